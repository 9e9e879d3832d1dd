#include <iostream>

#include "CLI11.hpp"
#include "polymoments/cli.hpp"

int main(int argc, char** argv) {
  using polymoments::cli::Format;
  using polymoments::cli::Mode;

  CLI::App app{"Moment engine for polynomial processes"};
  app.require_subcommand(1);

  polymoments::cli::CommandLine cmd;
  std::string format = "json";
  std::string dump;
  std::string out;

  for (const auto& [name, help] : {std::pair{"run", "evaluate the analytic formulas (or run a 'simulate' config)"},
                                    std::pair{"compare", "evaluate analytic and Monte Carlo values side by side"}}) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", cmd.config_path, "JSON configuration")->required();
    sub->add_option("--out", out, "output path (default: stdout)");
    sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--dump", dump, "write sample-level CSV (path_index, value) to this path");
    sub->add_option("--threads", cmd.threads, "worker threads; results do not depend on it")
        ->check(CLI::Range(1u, 1024u));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  cmd.mode = app.got_subcommand("compare") ? Mode::kCompare : Mode::kRun;
  cmd.format = format == "csv" ? Format::kCsv : Format::kJson;
  if (!out.empty()) cmd.out_path = out;
  if (!dump.empty()) cmd.dump_path = dump;
  return polymoments::cli::run(cmd, std::cout, std::cerr);
}
