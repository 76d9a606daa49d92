// faasbench: run, analyze and inspect simulated FaaS application benchmarks.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>

#include "CLI11.hpp"
#include "faasbench/pipeline.hpp"

namespace fb = faasbench;

namespace {

std::filesystem::path DefaultOutDir() {
  if (const char* env = std::getenv("FAASBENCH_OUT"); env != nullptr && *env != '\0') return env;
  return "out";
}

void PrintHeadline(const fb::Analysis& a) {
  std::cout << "records " << a.records << ", contexts " << a.contexts << " (" << a.complete_trees << " complete, "
            << a.incomplete_trees << " incomplete), dropped lines " << a.total_dropped << ", parse errors "
            << a.parse.parse_errors << "\n";
  for (const char* metric : {"root_rtt", "tree_compute", "tree_network", "tree_db", "publish_latency",
                             "trigger_delay"}) {
    if (const auto* row = a.Find(metric, "all"); row != nullptr && row->stats.p50) {
      std::cout << "  " << metric << " p50 " << *row->stats.p50 / 1000.0 << " ms (n=" << row->stats.count << ")\n";
    }
  }
  std::cout << "  cold starts " << a.coldstart.cold << " of " << a.coldstart.invocations << " invocations\n";
}

fb::ApplicationSpec ResolveApp(const std::string& benchmark, const std::string& app_path) {
  if (!app_path.empty()) return fb::LoadApplicationFile(app_path);
  return fb::LoadBuiltin(benchmark);
}

int CmdRun(const std::string& target, const std::string& recipe_name, const std::string& config_path,
           const std::string& profile_path, const std::string& app_path, const std::string& manifest_path,
           std::optional<std::uint64_t> seed, std::optional<double> scale, const std::string& out,
           std::int64_t max_parse_errors) {
  fb::RunOptions opts;
  try {
    if (!manifest_path.empty()) {
      opts = fb::OptionsFromManifest(manifest_path);
    } else {
      std::string recipe = recipe_name;
      std::string benchmark = target;
      const auto names = fb::RecipeNames();
      if (recipe.empty() && std::find(names.begin(), names.end(), target) != names.end()) recipe = target;
      std::optional<fb::Recipe> r;
      if (!recipe.empty()) {
        r = fb::LoadRecipe(recipe);
        if (benchmark.empty() || benchmark == recipe) benchmark = r->config.benchmark;
      } else if (config_path.empty() || profile_path.empty()) {
        if (benchmark.empty() && app_path.empty()) {
          std::cerr << "run: name a benchmark, a recipe, or pass --config and --profile\n";
          return fb::kExitUsage;
        }
        if (!benchmark.empty()) r = fb::LoadRecipe(fb::DefaultRecipeFor(benchmark));
      }
      opts.app = ResolveApp(benchmark, app_path);
      if (!config_path.empty()) {
        opts.config = fb::LoadDeploymentConfigFile(config_path);
        opts.config_source = config_path;
      } else if (r) {
        opts.config = r->config;
        opts.config_source = "recipe:" + r->name;
      } else {
        std::cerr << "run: --config is required for a custom application\n";
        return fb::kExitUsage;
      }
      if (!profile_path.empty()) {
        opts.profile = fb::LoadProfileFile(profile_path);
        opts.profile_source = profile_path;
      } else if (r) {
        opts.profile = r->profile;
        opts.profile_source = "recipe:" + r->name;
      } else {
        opts.profile = fb::BuiltinProfile(opts.app.name);
        opts.profile_source = "builtin:" + opts.app.name;
      }
      opts.max_parse_errors = max_parse_errors;
    }
    if (seed) opts.seed = *seed;
    if (scale) opts.profile.scale_factor = *scale;
  } catch (const fb::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return fb::kExitConfigError;
  }
  opts.out_dir = out.empty() ? DefaultOutDir() : std::filesystem::path(out);

  const fb::RunOutcome outcome = fb::RunBenchmark(opts);
  if (!outcome.run_dir.empty()) std::cout << "run " << outcome.run_id << " -> " << outcome.run_dir.string() << "\n";
  if (outcome.analysis) PrintHeadline(*outcome.analysis);
  if (outcome.exit_code != fb::kExitOk) std::cerr << "error: " << outcome.error << "\n";
  return outcome.exit_code;
}

int CmdAnalyze(const std::string& log_path, const std::string& out, std::int64_t max_parse_errors) {
  std::filesystem::path dir = out;
  if (dir.empty()) dir = std::filesystem::path(log_path).parent_path() / "reports";
  const fb::AnalyzeOutcome outcome = fb::AnalyzeLogFile(log_path, dir, max_parse_errors);
  if (outcome.analysis) {
    PrintHeadline(*outcome.analysis);
    std::cout << "reports -> " << dir.string() << "\n";
  }
  if (outcome.exit_code != fb::kExitOk) std::cerr << "error: " << outcome.error << "\n";
  return outcome.exit_code;
}

int CmdRecipes(const std::string& name, const std::string& out) {
  if (name.empty()) {
    for (const auto& n : fb::RecipeNames()) std::cout << n << "  " << fb::LoadRecipe(n).description << "\n";
    return fb::kExitOk;
  }
  try {
    const fb::Recipe r = fb::LoadRecipe(name);
    const std::string config = fb::DeploymentConfigToJson(r.config) + "\n";
    const std::string profile = fb::LoadProfileToJson(r.profile) + "\n";
    if (out.empty()) {
      std::cout << config << profile;
      return fb::kExitOk;
    }
    std::filesystem::create_directories(out);
    const auto config_path = std::filesystem::path(out) / (name + ".config.json");
    const auto profile_path = std::filesystem::path(out) / (name + ".profile.json");
    std::ofstream(config_path) << config;
    std::ofstream(profile_path) << profile;
    std::cout << config_path.string() << "\n" << profile_path.string() << "\n";
    return fb::kExitOk;
  } catch (const fb::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return fb::kExitConfigError;
  }
}

int CmdValidate(const std::string& benchmark, const std::string& app_path, const std::string& config_path,
                const std::string& profile_path) {
  try {
    if (benchmark.empty() && app_path.empty()) {
      std::cerr << "validate: name a benchmark or pass --app\n";
      return fb::kExitUsage;
    }
    const fb::ApplicationSpec app = ResolveApp(benchmark, app_path);
    const fb::ValidationReport report = fb::Validate(app);
    if (!report.ok()) {
      std::cerr << report.ToString();
      return fb::kExitConfigError;
    }
    const fb::CallGraph graph = fb::BuildCallGraph(app);
    std::cout << "application " << app.name << ": " << app.functions.size() << " functions, " << graph.edges.size()
              << " call edges\n";
    if (!config_path.empty()) {
      const fb::DeploymentPlan plan = fb::Compile(app, fb::LoadDeploymentConfigFile(config_path));
      std::cout << "config ok: " << plan.artifacts.size() << " platform artifacts\n";
    }
    if (!profile_path.empty()) {
      const fb::LoadProfile profile = fb::LoadProfileFile(profile_path);
      fb::ValidateProfile(profile, app);
      std::cout << "profile ok: " << profile.phases.size() << " phases\n";
    }
    return fb::kExitOk;
  } catch (const fb::Error& e) {
    std::cerr << "invalid: " << e.what() << "\n";
    return fb::kExitConfigError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"faasbench: application-centric FaaS benchmarks on simulated platforms"};
  app.set_version_flag("--version", std::string(fb::kVersion));
  app.require_subcommand(1);

  std::string target, recipe, config, profile, app_file, manifest, out;
  std::optional<std::uint64_t> seed;
  std::optional<double> scale;
  std::int64_t max_parse_errors = 0;

  auto* run = app.add_subcommand("run", "Compile, deploy, load, collect, analyze and tear down one benchmark run");
  run->add_option("benchmark", target, "Built-in benchmark or recipe name");
  run->add_option("--recipe", recipe, "Experiment recipe supplying config and profile");
  run->add_option("--config", config, "Deployment config file");
  run->add_option("--profile", profile, "Load profile file");
  run->add_option("--app", app_file, "Application description file instead of a built-in benchmark");
  run->add_option("--manifest", manifest, "Replay the inputs recorded in a run manifest");
  run->add_option("--seed", seed, "Random seed");
  run->add_option("--scale", scale, "Load scale factor")->check(CLI::PositiveNumber);
  run->add_option("--out", out, "Output directory (default $FAASBENCH_OUT or ./out)");
  run->add_option("--max-parse-errors", max_parse_errors, "Parse errors tolerated before exit code 5");

  std::string log_path;
  auto* analyze = app.add_subcommand("analyze", "Re-run the analysis on an existing raw log");
  analyze->add_option("log", log_path, "Raw log file")->required();
  analyze->add_option("--out", out, "Report directory (default: reports/ next to the log)");
  analyze->add_option("--max-parse-errors", max_parse_errors, "Parse errors tolerated before exit code 5");

  std::string recipe_name;
  auto* recipes = app.add_subcommand("recipes", "List recipes or write one recipe's config and profile");
  recipes->add_option("name", recipe_name, "Recipe name");
  recipes->add_option("--out", out, "Directory for the emitted files (default: stdout)");

  auto* validate = app.add_subcommand("validate", "Validate an application, deployment config and load profile");
  validate->add_option("benchmark", target, "Built-in benchmark name");
  validate->add_option("--app", app_file, "Application description file");
  validate->add_option("--config", config, "Deployment config file");
  validate->add_option("--profile", profile, "Load profile file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : fb::kExitUsage;
  }

  if (*run) return CmdRun(target, recipe, config, profile, app_file, manifest, seed, scale, out, max_parse_errors);
  if (*analyze) return CmdAnalyze(log_path, out, max_parse_errors);
  if (*recipes) return CmdRecipes(recipe_name, out);
  if (*validate) return CmdValidate(target, app_file, config, profile);
  return fb::kExitUsage;
}
