#pragma once

#include <span>
#include <string>
#include <vector>

#include "geomgan/graph.hpp"

namespace geomgan {

// Unified hyperplane view of adversarial training: every variant is the
// same alternating scheme over a separating hyperplane in feature space,
// differing only in its loss pair and per-sample geometric scaling factors.

enum class VariantKind {
  geometric,        // soft-margin SVM hyperplane
  mean_difference,  // McGAN dual form, mean matching in l2
  wgan,             // mean difference on the l-inf ball
  vanilla_gan,      // minimax sigmoid cross-entropy
  fgan,             // variational f-divergence objective
  ebgan,            // energy margin losses
  erm,              // per-pair feature matching
};

enum class FDivergence { total_variation, kl, reverse_kl, pearson_chi2, jensen_shannon, gan };

struct VariantSpec {
  VariantKind kind = VariantKind::geometric;
  FDivergence divergence = FDivergence::gan;  // fgan only
  double C = 1.0;                             // geometric only, SVM tuning parameter
  double margin = 1.0;                        // ebgan only

  void validate() const;
};

std::string variant_kind_name(VariantKind k);
std::string divergence_name(FDivergence d);
VariantKind parse_variant_kind(const std::string& s);
FDivergence parse_divergence(const std::string& s);

// Per-sample weights multiplying true/fake feature gradients in the
// unified update.
struct ScalingFactors {
  std::vector<double> t;  // true samples
  std::vector<double> s;  // fake samples
};

struct LossValues {
  double d_loss = 0.0;
  double g_loss = 0.0;
};

// --- closed-form losses and scaling factors ------------------------------

// ||w||^2/(2Cn) + mean [1 - score_real]+ + mean [1 + score_fake]+
double svm_discriminator_loss(std::span<const double> scores_real,
                              std::span<const double> scores_fake,
                              double w_norm_sq, double C, std::size_t n);

// -mean(score_fake)
double svm_generator_loss(std::span<const double> scores_fake);

// Margin set membership: |score| <= 1, boundary inclusive.
bool margin_membership(double score);

// Binary factors: 1 inside the margin set, 0 outside.
ScalingFactors geometric_scaling(std::span<const double> scores_real,
                                 std::span<const double> scores_fake);

// Sigmoid-activation factors: t = 1 - sigma(u_real), s = sigma(u_fake).
ScalingFactors gan_scaling(std::span<const double> u_real,
                           std::span<const double> u_fake);

// Closed-form t(u) = S_f'(u) and s(u) = (f*)'(S_f(u)) * S_f'(u) per divergence.
double fgan_t(FDivergence d, double u);
double fgan_s(FDivergence d, double u);
ScalingFactors fgan_scaling(FDivergence d, std::span<const double> u_real,
                            std::span<const double> u_fake);

LossValues wgan_losses(std::span<const double> scores_real,
                       std::span<const double> scores_fake);

LossValues ebgan_losses(std::span<const double> scores_real,
                        std::span<const double> scores_fake, double m);

// Numerically stable in the logits (finite for |logit| up to ~1e308).
LossValues vanilla_gan_losses(std::span<const double> logits_real,
                              std::span<const double> logits_fake);

// Per-column mean(phi(x)) - mean(phi(g(z))) over [n x d] feature matrices.
Array mean_difference_direction(const Array& features_real,
                                const Array& features_fake);

// Dual mean-matching objective: d = -1/2 ||mean diff||^2, g = +1/2 ||mean diff||^2.
LossValues mcgan_losses(const Array& features_real, const Array& features_fake);

// 1/2 sum_i ||phi(x_i) - phi(g(z_i))||^2 over paired minibatches.
double erm_pairwise_loss(const Array& features_real, const Array& features_fake);

// --- graph wiring ---------------------------------------------------------

struct LossPair {
  NodeId d_loss = -1;  // discriminator objective, minimized over {w, b, zeta}
  NodeId g_loss = -1;  // generator objective, minimized over theta
};

// f-GAN building blocks, exposed so tests can differentiate the same
// compositions the training path uses.
NodeId fgan_activation(Graph& g, FDivergence d, NodeId v);           // S_f(v)
NodeId fgan_conjugate(Graph& g, FDivergence d, NodeId v);            // f*(v)
NodeId fgan_conjugate_of_activation(Graph& g, FDivergence d, NodeId u);  // f*(S_f(u))

// Wires the variant's loss pair into the shared graph. `final_w` is the
// hyperplane normal for the ||w||^2 penalty (geometric only; the penalty
// never touches b, zeta or theta). `batch_n` is the minibatch size n of
// the 1/(2Cn) coefficient.
LossPair build_losses(Graph& g, const VariantSpec& variant, NodeId scores_real,
                      NodeId scores_fake, NodeId features_real, NodeId features_fake,
                      NodeId final_w, std::size_t batch_n);

// --- full adversarial models ----------------------------------------------

// One graph holding generator, feature map, final linear layer and both
// losses; owned by a single training run.
struct AdversarialModel {
  Graph graph;
  VariantSpec variant;
  std::size_t latent_dim = 0;
  NodeId x_input = -1;
  NodeId z_input = -1;
  NodeId gen_output = -1;
  NodeId features_real = -1;
  NodeId features_fake = -1;
  NodeId scores_real = -1;
  NodeId scores_fake = -1;
  LossPair losses;
  // Feature-matching variants take their generator signal from features, so
  // their g step needs the real minibatch too.
  bool g_step_uses_real = false;
  // False when scores are diagnostic only (mean-difference, erm), in which
  // case implied_scores() supplies them from the feature values.
  bool scores_trained = true;
};

AdversarialModel build_adversarial_model(const VariantSpec& variant,
                                         const MlpSpec& disc_spec,
                                         const MlpSpec& gen_spec,
                                         std::size_t batch_n, std::uint64_t seed);

// The 1-parameter parallel-lines model: g_theta(z) = (theta, z) against a
// discriminator linear in x.
AdversarialModel build_lines_model(const VariantSpec& variant, std::size_t batch_n,
                                   double theta0, std::uint64_t seed);

// Scores induced by the mean-difference hyperplane halfway between the two
// feature clouds; used for diagnostics where the final layer is untrained.
void implied_md_scores(const Array& features_real, const Array& features_fake,
                       std::vector<double>& scores_real,
                       std::vector<double>& scores_fake);

// Flattens an [n x 1] score column into a plain vector.
std::vector<double> score_column(const Array& scores);

}  // namespace geomgan
