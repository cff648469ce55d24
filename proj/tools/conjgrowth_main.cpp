#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "conjgrowth/experiment.hpp"

using namespace conjgrowth;

namespace {

int writeBundle(const std::string& path, const std::string& body) {
  std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      std::cerr << "error: cannot open " << tmp.string() << '\n';
      return kExitFailure;
    }
    out << body;
  }
  std::filesystem::rename(tmp, target);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conjugacy growth experiments on free and free-product group models"};
  app.require_subcommand(1);

  ExperimentConfig config;
  std::vector<std::string> fragments;
  std::string bundlePath = "report.json";

  auto common = [&](CLI::App* cmd) {
    cmd->add_option("--model", config.modelSpec,
                    "group model: free:K or product:M1,M2,...")
        ->capture_default_str();
    cmd->add_option("--id", config.id,
                    "experiment id and output file stem (default: subcommand name)");
    cmd->add_option("--out", config.outDir, "output directory")->capture_default_str();
    cmd->add_option("--budget", config.budget, "enumeration budget")
        ->capture_default_str();
    cmd->add_option("--shards", config.shards, "enumeration shard count")
        ->capture_default_str();
    cmd->add_option("--seed", config.seed, "random seed (echoed into every output)")
        ->capture_default_str();
    return cmd;
  };
  auto radius = [&](CLI::App* cmd) {
    cmd->add_option("--max-radius", config.maxRadius, "largest enumerated radius")
        ->capture_default_str();
    return cmd;
  };
  auto axisElement = [&](CLI::App* cmd) {
    cmd->add_option("--f", config.f, "contracting element, space-separated letters")
        ->capture_default_str();
    return cmd;
  };
  auto window = [&](CLI::App* cmd) {
    cmd->add_option("--K", config.K,
                    "projection threshold (0: smallest connecting value)")
        ->capture_default_str();
    cmd->add_option("--window", config.windowRadius, "coset window ball radius")
        ->capture_default_str();
    return cmd;
  };

  common(app.add_subcommand("model-info", "describe a group model"));

  CLI::App* balls = radius(common(
      app.add_subcommand("census-balls", "sphere/ball/annulus counts with growth fit")));
  balls->add_option("--delta-width", config.annulusWidth, "annulus width")
      ->capture_default_str();

  CLI::App* conjugacy = radius(common(app.add_subcommand(
      "census-conjugacy", "conjugacy classes by pointed and stable length")));
  conjugacy->add_option("--window-lo", config.windowLo, "envelope window start")
      ->capture_default_str();
  conjugacy->add_option("--window-hi", config.windowHi, "envelope window end")
      ->capture_default_str();

  CLI::App* barriers = axisElement(radius(common(
      app.add_subcommand("census-barriers", "barrier-free fraction per radius"))));
  barriers->add_option("--epsilon", config.epsilon, "barrier closeness")
      ->capture_default_str();
  barriers->add_option("--M", config.barrierM, "endpoint neighborhood trimmed off")
      ->capture_default_str();

  CLI::App* fractional = axisElement(radius(common(app.add_subcommand(
      "census-fractional", "fractional barrier-free coverage per radius"))));
  fractional->add_option("--epsilon", config.epsilon, "barrier closeness")
      ->capture_default_str();
  fractional->add_option("--M", config.barrierM, "endpoint neighborhood trimmed off")
      ->capture_default_str();
  fractional->add_option("--theta", config.theta, "required covered fraction")
      ->capture_default_str();
  fractional->add_option("--L", config.minLength, "minimum interval length")
      ->capture_default_str();

  CLI::App* drift = axisElement(radius(common(
      app.add_subcommand("census-drift", "linear drift clause fractions per radius"))));
  drift->add_option("--m", config.m, "barrier power of f")->capture_default_str();
  drift->add_option("--theta1", config.theta1, "stable length slack")
      ->capture_default_str();
  drift->add_option("--theta2", config.theta2, "axis distance slack")
      ->capture_default_str();
  drift->add_option("--epsilon", config.epsilon, "barrier closeness")
      ->capture_default_str();

  axisElement(radius(common(app.add_subcommand(
      "audit-contraction", "empirical contraction and intersection constants"))));

  CLI::App* admissible = axisElement(common(app.add_subcommand(
      "admissible", "random periodic admissible witnesses plus mutations")));
  admissible->add_option("--m", config.m, "power of f in g = t1 f^m t2")
      ->capture_default_str();
  admissible->add_option("--trials", config.trials, "witnesses to build")
      ->capture_default_str();
  admissible->add_option("--t-length", config.tLength, "max length of t1, t2")
      ->capture_default_str();

  window(axisElement(common(
      app.add_subcommand("complex-build", "projection complex adjacency and metadata"))));

  CLI::App* loxo = window(axisElement(common(app.add_subcommand(
      "complex-loxodromic", "separation growth of powers acting on the complex"))));
  loxo->add_option("--g", config.g, "candidate loxodromic element")
      ->capture_default_str();
  loxo->add_option("--Nmax", config.nMax, "largest tested power")->capture_default_str();
  loxo->add_option("--K-prime", config.kPrime, "separation verdict threshold")
      ->capture_default_str();

  CLI::App* acyl = window(axisElement(common(app.add_subcommand(
      "complex-acyl", "acylindricity mover counts and kernel bound"))));
  acyl->add_option("--D", config.acylD, "displacement bound")->capture_default_str();
  acyl->add_option("--mover-radius", config.acylR, "mover ball radius")
      ->capture_default_str();
  acyl->add_option("--kernel-radius", config.kernelRadius,
                   "sample sphere radius for the kernel probe (0 skips)")
      ->capture_default_str();
  acyl->add_option("--search-radius", config.searchRadius,
                   "elementary subgroup search radius")
      ->capture_default_str();

  CLI::App* series = common(app.add_subcommand(
      "series", "exact growth coefficients, rationality probe, envelope"));
  series->add_option("--kind", config.seriesKind,
                     "sphere|ball|conjugacy-pointed|conjugacy-primitive|"
                     "conjugacy-stable-capped")
      ->capture_default_str();
  series->add_option("--max-n", config.maxN, "largest coefficient index")
      ->capture_default_str();
  series->add_option("--max-order", config.maxOrder, "largest probed recurrence order")
      ->capture_default_str();
  series->add_option("--window-lo", config.windowLo, "envelope window start")
      ->capture_default_str();
  series->add_option("--window-hi", config.windowHi, "envelope window end")
      ->capture_default_str();

  CLI::App* scc = radius(common(app.add_subcommand(
      "scc-estimate", "subgroup vs escaping-set growth exponents")));
  scc->add_option("--generators", config.generators,
                  "comma-separated subgroup generators")
      ->capture_default_str();
  scc->add_option("--M1", config.M1, "neighborhood radius of the subgroup orbit")
      ->capture_default_str();
  scc->add_option("--M2", config.M2, "trimmed prefix/suffix length")
      ->capture_default_str();

  CLI::App* report =
      app.add_subcommand("report", "merge experiment JSON fragments into one bundle");
  report->add_option("fragments", fragments, "fragment JSON files");
  report->add_option("--out", bundlePath, "bundle output path")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  CLI::App* picked = app.get_subcommands().front();
  if (picked == report) {
    try {
      return writeBundle(bundlePath, emitReport(fragments));
    } catch (const IdCollisionError& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kExitCollision;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kExitUsage;
    }
  }
  config.kind = picked->get_name();
  return runExperiment(config);
}
