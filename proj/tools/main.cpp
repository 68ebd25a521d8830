#include <functional>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "crisp/errors.hpp"

namespace {

using crisp::tools::KvConfig;

struct PendingCommand {
  KvConfig config;
  void (*run)(const KvConfig&);
  std::string config_file;
  std::vector<std::string> overrides;  // key=value pairs from --set
};

void apply_overrides(PendingCommand& cmd) {
  if (!cmd.config_file.empty()) cmd.config.load_file(cmd.config_file);
  for (const std::string& kv : cmd.overrides) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos) {
      throw crisp::ConfigError("--set expects key=value, got '" + kv + "'");
    }
    cmd.config.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
}

// Error output stays on a single line so callers can parse it.
std::string one_line(const char* what) {
  std::string s(what);
  for (char& c : s) {
    if (c == '\n') c = ';';
  }
  return s;
}

PendingCommand* register_command(CLI::App& app, std::vector<PendingCommand>& pending,
                                 const char* name, const char* brief, KvConfig keys,
                                 void (*run)(const KvConfig&)) {
  pending.push_back(PendingCommand{std::move(keys), run, "", {}});
  PendingCommand* cmd = &pending.back();

  CLI::App* sub = app.add_subcommand(name, brief);
  sub->add_option("-c,--config", cmd->config_file, "key=value configuration file");
  sub->add_option("-D,--set", cmd->overrides, "override one key (key=value, repeatable)");
  sub->footer("Keys:\n" + cmd->config.describe());
  sub->callback([cmd] {
    apply_overrides(*cmd);
    cmd->run(cmd->config);
  });
  return cmd;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"crisp: CRF-refined segmentation maps to particle picks"};
  app.require_subcommand(1);

  std::vector<PendingCommand> pending;
  pending.reserve(6);
  register_command(app, pending, "synth",
                   "generate synthetic micrographs from a reference volume",
                   crisp::tools::synth_keys(), crisp::tools::run_synth);
  register_command(app, pending, "refine",
                   "refine a probability map with the dense CRF",
                   crisp::tools::refine_keys(), crisp::tools::run_refine);
  register_command(app, pending, "pick", "pick particle centers from a map",
                   crisp::tools::pick_keys(), crisp::tools::run_pick);
  register_command(app, pending, "tune",
                   "grid-search picker settings against ground truth",
                   crisp::tools::tune_keys(), crisp::tools::run_tune);
  register_command(app, pending, "eval", "pixel metrics of a mask against ground truth",
                   crisp::tools::eval_keys(), crisp::tools::run_eval);
  register_command(app, pending, "fsc",
                   "Fourier shell correlation between two half-maps",
                   crisp::tools::fsc_keys(), crisp::tools::run_fsc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const crisp::ConfigError& e) {
    std::cerr << "crisp: config-error: " << one_line(e.what()) << "\n";
    return 2;
  } catch (const crisp::IoError& e) {
    std::cerr << "crisp: io-error: " << one_line(e.what()) << "\n";
    return 3;
  } catch (const crisp::NumericalError& e) {
    std::cerr << "crisp: numerical-error: " << one_line(e.what()) << "\n";
    return 4;
  }
  return 0;
}
