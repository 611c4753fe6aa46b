// Command-line front end: seeded adversarial training runs over the synthetic
// datasets, cross-run summaries, and the closed-form theory checks.

#include <cmath>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "geomgan/experiment.hpp"
#include "geomgan/theory.hpp"

using namespace geomgan;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitNumericAbort = 2;

struct TrainFlags {
  std::string config_path;
  std::string variant, dataset, divergence, optimizer, constraint, scope, out;
  std::string wall_clock;
  double C = 0, margin = 0, lr = 0, clip = 0, wdecay = 0, radius_stds = 0, theta0 = 0;
  long batch = 0, kd = 0, kg = 0, max_steps = 0, log_interval = 0, min_count = 0;
  long eval_samples = 0, dump_samples = 0, pool_size = -1;
  std::vector<long> seeds;
  bool theta0_set = false;
};

int run_train(const TrainFlags& f, const CLI::App& cmd) {
  KvPairs overrides;
  auto add = [&](const char* key, const std::string& value) {
    overrides.emplace_back(key, value);
  };
  if (cmd.count("--variant")) add("variant", f.variant);
  if (cmd.count("--dataset")) add("dataset", f.dataset);
  if (cmd.count("--divergence")) add("divergence", f.divergence);
  if (cmd.count("--optimizer")) add("optimizer", f.optimizer);
  if (cmd.count("--constraint")) add("constraint", f.constraint);
  if (cmd.count("--scope")) add("scope", f.scope);
  if (cmd.count("--out")) add("out", f.out);
  if (cmd.count("--wall-clock")) add("wall_clock", f.wall_clock);
  if (cmd.count("--C")) add("C", format_double(f.C));
  if (cmd.count("--margin")) add("margin", format_double(f.margin));
  if (cmd.count("--lr")) add("lr", format_double(f.lr));
  if (cmd.count("--clip")) add("clip", format_double(f.clip));
  if (cmd.count("--wdecay")) add("wdecay", format_double(f.wdecay));
  if (cmd.count("--radius-stds")) add("radius_stds", format_double(f.radius_stds));
  if (cmd.count("--theta0")) add("theta0", format_double(f.theta0));
  if (cmd.count("--batch")) add("batch", std::to_string(f.batch));
  if (cmd.count("--kd")) add("kd", std::to_string(f.kd));
  if (cmd.count("--kg")) add("kg", std::to_string(f.kg));
  if (cmd.count("--max-steps")) add("max_steps", std::to_string(f.max_steps));
  if (cmd.count("--log-interval")) add("log_interval", std::to_string(f.log_interval));
  if (cmd.count("--min-count")) add("min_count", std::to_string(f.min_count));
  if (cmd.count("--eval-samples")) add("eval_samples", std::to_string(f.eval_samples));
  if (cmd.count("--dump-samples")) add("dump_samples", std::to_string(f.dump_samples));
  if (cmd.count("--pool-size")) add("pool_size", std::to_string(f.pool_size));
  if (cmd.count("--seed")) {
    std::string seeds;
    for (long s : f.seeds) {
      if (!seeds.empty()) seeds += ',';
      seeds += std::to_string(s);
    }
    add("seeds", seeds);
  }

  ExperimentConfig cfg = f.config_path.empty()
                             ? resolve_config({}, overrides)
                             : parse_config(f.config_path, overrides);
  ExperimentResult res = run_experiment(cfg);
  for (const RunOutput& run : res.runs) {
    if (run.finite)
      std::printf("run %s: step %ld d_loss %.6g g_loss %.6g eq_gap %.6g modes %d\n",
                  run.dir.c_str(), run.final_row.step, run.final_row.d_loss,
                  run.final_row.g_loss, run.final_row.equilibrium_gap,
                  run.final_row.covered_modes);
    else
      std::printf("run %s: aborted on non-finite loss at step %ld\n", run.dir.c_str(),
                  run.final_row.step);
  }
  return res.all_finite ? kExitOk : kExitNumericAbort;
}

bool check(const char* name, bool ok) {
  std::printf("%s %s\n", ok ? "PASS" : "FAIL", name);
  return ok;
}

int run_verify_theory() {
  bool all = true;

  {  // Lemma 1: minimum 2m on exactly {y >= -m}.
    bool ok = true;
    for (double m : {0.5, 1.0, 2.0}) {
      double best = 1e300, arg = 0;
      for (double y = -5 * m; y <= 5 * m; y += 1e-3) {
        double v = phi_lemma1(y, m);
        if (v < best) {
          best = v;
          arg = y;
        }
      }
      ok = ok && std::fabs(best - 2 * m) < 2e-3 && arg >= -m - 2e-3;
      ok = ok && phi_lemma1(-m - 0.01, m) > 2 * m + 0.005;
      ok = ok && std::fabs(phi_lemma1(5 * m, m) - 2 * m) < 1e-12;
    }
    all &= check("lemma-1: min phi = 2m on y >= -m", ok);
  }

  {  // Lemma 2: minimum 2 min(alpha, beta) m inside [-m, m].
    bool ok = true;
    RngStream rng(7, 0);
    for (int rep = 0; rep < 40; ++rep) {
      double alpha = rng.uniform(0.05, 5.0), beta = rng.uniform(0.05, 5.0);
      double m = rng.uniform(0.2, 2.0);
      double best = 1e300, arg = 0;
      for (double y = -5 * m; y <= 5 * m; y += 1e-3) {
        double v = phi_lemma2(y, alpha, beta, m);
        if (v < best) {
          best = v;
          arg = y;
        }
      }
      ok = ok && std::fabs(best - 2 * std::min(alpha, beta) * m) < 2e-3 * (alpha + beta);
      ok = ok && arg >= -m - 2e-3 && arg <= m + 2e-3;
    }
    all &= check("lemma-2: min phi = 2 min(alpha,beta) m at |y| <= m", ok);
  }

  {  // Equilibrium cost on discrete density pairs.
    bool ok = true;
    RngStream rng(11, 1);
    for (int rep = 0; rep < 200; ++rep) {
      std::size_t bins = 2 + static_cast<std::size_t>(rng.bounded(15));
      DiscreteDensityPair d;
      d.p.resize(bins);
      d.q.resize(bins);
      double sp = 0, sq = 0;
      for (std::size_t i = 0; i < bins; ++i) {
        d.p[i] = rng.uniform01() + 1e-4;
        d.q[i] = rng.uniform01() + 1e-4;
        sp += d.p[i];
        sq += d.q[i];
      }
      double rp = 0, rq = 0;
      for (std::size_t i = 0; i + 1 < bins; ++i) {
        d.p[i] /= sp;
        d.q[i] /= sq;
        rp += d.p[i];
        rq += d.q[i];
      }
      d.p[bins - 1] = 1.0 - rp;
      d.q[bins - 1] = 1.0 - rq;
      double closed = optimal_discriminator_cost(d);
      double brute = brute_force_discriminator_cost(d, 2e-3);
      ok = ok && std::fabs(closed - brute) <= 4e-3 && closed <= 2.0 + 1e-15;
    }
    DiscreteDensityPair eq{{0.5, 0.25, 0.25}, {0.5, 0.25, 0.25}};
    ok = ok && optimal_discriminator_cost(eq) == 2.0;
    all &= check("equilibrium: brute-force per-bin minimum matches 2 sum min(p,q)", ok);
  }

  {  // Example 1 closed forms and the Monte Carlo cross-check.
    bool ok = true;
    Hyperplane2D h = parallel_lines_hyperplane(1.0);
    ok = ok && h.w[0] == -1.0 && h.w[1] == 0.0 && h.b == 0.5;
    ok = ok && parallel_lines_generator_loss(0.5) == 0.25;
    ok = ok && parallel_lines_discriminator_cost(0.0) == 2.0;
    for (double theta : {0.3, -0.8, 1.2}) {
      RngStream rng(17, 2);
      const std::size_t n = 100000;
      Array real = sample_parallel_lines_real(n, rng);
      Array lat = sample_parallel_lines_latent(n, rng);
      Array fake = parallel_lines_generator(theta, lat.data);
      Hyperplane2D hp = parallel_lines_hyperplane(theta);
      std::vector<double> sr(n), sf(n);
      for (std::size_t i = 0; i < n; ++i) {
        sr[i] = hp.w[0] * real.at(i, 0) + hp.w[1] * real.at(i, 1) + hp.b;
        sf[i] = hp.w[0] * fake.at(i, 0) + hp.w[1] * fake.at(i, 1) + hp.b;
      }
      double cost = svm_discriminator_loss(sr, sf, 1.0, 1.0, n);
      ok = ok && std::fabs(cost - parallel_lines_discriminator_cost(theta)) < 1e-2;
      ok = ok &&
           std::fabs(svm_generator_loss(sf) - parallel_lines_generator_loss(theta)) < 1e-9;
    }
    all &= check("example-1: parallel-lines hyperplane, L = |theta|/2, R -> 2", ok);
  }

  return all ? kExitOk : kExitNumericAbort;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hyperplane-view adversarial training on synthetic data"};
  app.require_subcommand(1);

  TrainFlags tf;
  CLI::App* train = app.add_subcommand("train", "Train one variant over seeds");
  train->add_option("--config", tf.config_path, "key=value config file");
  train->add_option("--variant", tf.variant,
                    "geometric|mean-difference|wgan|vanilla-gan|fgan|ebgan|erm");
  train->add_option("--dataset", tf.dataset, "grid25|lines");
  train->add_option("--divergence", tf.divergence,
                    "fgan only: total-variation|kl|reverse-kl|pearson-chi2|"
                    "jensen-shannon|gan");
  train->add_option("--optimizer", tf.optimizer, "rmsprop|adam");
  train->add_option("--constraint", tf.constraint, "none|clip|l2-project|weight-decay");
  train->add_option("--scope", tf.scope, "constraint scope, e.g. zeta,theta");
  train->add_option("--out", tf.out, "output directory");
  train->add_option("--wall-clock", tf.wall_clock,
                    "none|real (real makes trace.csv non-reproducible)");
  train->add_option("--C", tf.C, "SVM tuning parameter (geometric)");
  train->add_option("--margin", tf.margin, "EB-GAN margin");
  train->add_option("--lr", tf.lr, "learning rate");
  train->add_option("--clip", tf.clip, "clip bound");
  train->add_option("--wdecay", tf.wdecay, "weight decay");
  train->add_option("--radius-stds", tf.radius_stds, "mode coverage radius in stds");
  train->add_option("--theta0", tf.theta0, "lines: initial generator parameter");
  train->add_option("--batch", tf.batch, "minibatch size");
  train->add_option("--kd", tf.kd, "discriminator steps per cycle");
  train->add_option("--kg", tf.kg, "generator steps per cycle");
  train->add_option("--max-steps", tf.max_steps, "alternating cycles");
  train->add_option("--log-interval", tf.log_interval, "cycles between trace rows");
  train->add_option("--min-count", tf.min_count, "mode coverage count threshold");
  train->add_option("--eval-samples", tf.eval_samples, "samples per metric evaluation");
  train->add_option("--dump-samples", tf.dump_samples, "samples_final.csv size");
  train->add_option("--pool-size", tf.pool_size, "grid25 fixed pool size (0 = fresh)");
  train->add_option("--seed", tf.seeds, "seed (repeatable)");

  std::vector<std::string> compare_dirs;
  std::string compare_out = "summary.csv";
  CLI::App* compare = app.add_subcommand("compare", "Summarize finished runs");
  compare->add_option("dirs", compare_dirs, "run directories")->required();
  compare->add_option("--out", compare_out, "summary csv path");

  CLI::App* verify = app.add_subcommand(
      "verify-theory", "Check the closed-form lemmas, the equilibrium value and "
                       "the parallel-lines example");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return run_train(tf, *train);
    if (compare->parsed()) {
      compare_runs(compare_dirs, compare_out);
      std::printf("wrote %s (%zu runs)\n", compare_out.c_str(), compare_dirs.size());
      return kExitOk;
    }
    if (verify->parsed()) return run_verify_theory();
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfigError;
  }
  return kExitConfigError;
}
