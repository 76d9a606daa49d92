#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "faasbench/pipeline.hpp"

namespace py = pybind11;
namespace fb = faasbench;

namespace {

// Inputs are JSON texts; an empty string selects the builtin or recipe default.
struct Inputs {
  fb::ApplicationSpec app;
  fb::DeploymentConfig config;
  fb::LoadProfile profile;
};

Inputs Resolve(const std::string& benchmark, const std::string& config_json, const std::string& profile_json,
               double scale) {
  Inputs in;
  in.app = fb::LoadBuiltin(benchmark);
  const fb::Recipe recipe = fb::LoadRecipe(fb::DefaultRecipeFor(benchmark));
  in.config = config_json.empty() ? recipe.config : fb::DeploymentConfigFromJson(config_json);
  in.profile = profile_json.empty() ? recipe.profile : fb::LoadProfileFromJson(profile_json);
  if (scale > 0) in.profile.scale_factor = scale;
  return in;
}

py::dict Outcome(int code, const std::string& run_id, const std::string& run_dir, const std::string& error,
                 const std::optional<fb::Analysis>& analysis) {
  py::dict d;
  d["exit_code"] = code;
  d["run_id"] = run_id;
  d["run_dir"] = run_dir;
  d["error"] = error;
  d["summary"] = analysis ? py::str(fb::SummaryJson(*analysis)) : py::str("");
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.attr("__version__") = std::string(fb::kVersion);

  py::register_exception<fb::Error>(m, "FaasbenchError", PyExc_RuntimeError);

  m.def("benchmarks", &fb::BuiltinBenchmarkNames);
  m.def("recipes", &fb::RecipeNames);
  m.def("recipe", [](const std::string& name) {
    const fb::Recipe r = fb::LoadRecipe(name);
    return py::make_tuple(fb::DeploymentConfigToJson(r.config), fb::LoadProfileToJson(r.profile));
  });
  m.def("application", [](const std::string& name) { return fb::ApplicationToJson(fb::LoadBuiltin(name)); });

  m.def("validate", [](const std::string& benchmark, const std::string& config_json, const std::string& profile_json) {
    const Inputs in = Resolve(benchmark, config_json, profile_json, 0);
    fb::Compile(in.app, in.config);
    fb::ValidateProfile(in.profile, in.app);
  }, py::arg("benchmark"), py::arg("config") = "", py::arg("profile") = "");

  m.def("simulate",
        [](const std::string& benchmark, std::uint64_t seed, double scale, const std::string& config_json,
           const std::string& profile_json) {
          const Inputs in = Resolve(benchmark, config_json, profile_json, scale);
          fb::SimulationResult sim;
          {
            py::gil_scoped_release release;
            sim = fb::Simulate(in.app, in.config, in.profile, seed);
          }
          py::dict d;
          d["run_id"] = sim.run_id;
          d["log"] = fb::JoinLines(sim.raw_lines);
          d["summary"] = fb::SummaryJson(fb::Analyze(fb::ParseLogs(sim.raw_lines)));
          return d;
        },
        py::arg("benchmark"), py::arg("seed") = 1, py::arg("scale") = 0.0, py::arg("config") = "",
        py::arg("profile") = "");

  m.def("run",
        [](const std::string& benchmark, const std::filesystem::path& out, std::uint64_t seed, double scale,
           const std::string& config_json, const std::string& profile_json) {
          const Inputs in = Resolve(benchmark, config_json, profile_json, scale);
          fb::RunOptions o;
          o.app = in.app;
          o.config = in.config;
          o.profile = in.profile;
          o.seed = seed;
          o.out_dir = out;
          fb::RunOutcome r;
          {
            py::gil_scoped_release release;
            r = fb::RunBenchmark(o);
          }
          return Outcome(r.exit_code, r.run_id, r.run_dir.string(), r.error, r.analysis);
        },
        py::arg("benchmark"), py::arg("out"), py::arg("seed") = 1, py::arg("scale") = 0.0, py::arg("config") = "",
        py::arg("profile") = "");

  m.def("analyze",
        [](const std::filesystem::path& log, const std::filesystem::path& reports, std::int64_t max_parse_errors) {
          fb::AnalyzeOutcome r;
          {
            py::gil_scoped_release release;
            r = fb::AnalyzeLogFile(log, reports, max_parse_errors);
          }
          return Outcome(r.exit_code, "", "", r.error, r.analysis);
        },
        py::arg("log"), py::arg("reports"), py::arg("max_parse_errors") = 0);
}
