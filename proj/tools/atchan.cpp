#include <unistd.h>

#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "atchan/cli.hpp"

int main(int argc, char** argv) {
  using atchan::cli::Format;
  atchan::cli::Options opts;
  CLI::App app{"Consistency of attack trees with effects"};
  app.require_subcommand(1);

  std::string format = "text";
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "json"}));
  app.add_option("--dot", opts.dot_dir, "Write DOT files to this directory");
  app.add_option("--max-search", opts.max_search, "Witness search cap")->check(CLI::PositiveNumber);
  app.add_option("--seed", opts.seed, "Seed of the randomized law samples");
  app.add_flag("--strict", opts.strict, "Treat warnings as errors");

  auto files = [&](CLI::App* sub) { sub->add_option("files", opts.files, "Model files")->required(); };
  files(app.add_subcommand("check", "Consistency and completeness of every branch"));
  auto* attr = app.add_subcommand("attr", "Evaluate an attribute from the model's leaf values");
  attr->add_option("name", opts.attribute, "min_experts or possibility")->required();
  files(attr);
  files(app.add_subcommand("mitigate", "Check residual effects and list admissible mitigations"));
  files(app.add_subcommand("project", "Causal projection and its commutation check"));
  files(app.add_subcommand("scenarios", "List the refinement scenarios"));
  app.fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return atchan::cli::kUsage;
  }
  opts.command = app.get_subcommands().front()->get_name();
  opts.format = format == "json" ? Format::Json : Format::Text;
  opts.color = opts.format == Format::Text && atchan::cli::use_color(std::getenv("ATCHAN_COLOR"), isatty(1));
  return atchan::cli::run(opts, std::cout, std::cerr);
}
