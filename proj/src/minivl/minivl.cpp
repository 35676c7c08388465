#include "minivl/minivl.hpp"

#include <fstream>
#include <optional>
#include <sstream>

#include "minivl/parser.hpp"
#include "minivl/simulator.hpp"

namespace minivl {

namespace {

std::optional<Design> compile(const std::vector<NamedSource>& sources, const std::string& top,
                              std::vector<Diagnostic>& diags) {
  std::vector<SourceUnit> units;
  for (const auto& src : sources) {
    try {
      units.push_back(SourceUnit{src.name, parse_source(src.text)});
    } catch (const SyntaxError& e) {
      diags.push_back(Diagnostic{src.name, e.line(), e.message()});
    }
  }
  if (!diags.empty()) return std::nullopt;
  try {
    return elaborate(units, top);
  } catch (const CompileError& e) {
    diags.push_back(Diagnostic{e.file(), e.line(), e.what()});
  }
  return std::nullopt;
}

bool read_all(const std::vector<std::string>& paths, std::vector<NamedSource>& out,
              std::vector<Diagnostic>& diags) {
  for (const auto& path : paths) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      diags.push_back(Diagnostic{path, 0, "cannot open file"});
      continue;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    out.push_back(NamedSource{path, ss.str()});
  }
  return diags.empty();
}

}  // namespace

std::string Diagnostic::str() const {
  std::string where;
  if (!file.empty()) where = file + ":";
  if (line > 0) where += std::to_string(line) + ":";
  if (!where.empty()) where += " ";
  return where + "error: " + message;
}

CheckResult check_sources(const std::vector<NamedSource>& sources, const std::string& top) {
  CheckResult r;
  auto design = compile(sources, top, r.diagnostics);
  if (design) {
    r.ok = true;
    r.tops = design->tops;
  }
  return r;
}

CheckResult check_files(const std::vector<std::string>& paths, const std::string& top) {
  CheckResult r;
  std::vector<NamedSource> sources;
  if (!read_all(paths, sources, r.diagnostics)) return r;
  return check_sources(sources, top);
}

SimResult simulate_sources(const std::vector<NamedSource>& sources, const SimOptions& options) {
  SimResult r;
  auto design = compile(sources, options.top, r.diagnostics);
  if (!design) {
    r.exit_code = 1;
    return r;
  }
  return simulate(std::move(*design), options);
}

SimResult simulate_files(const std::vector<std::string>& paths, const SimOptions& options) {
  SimResult r;
  std::vector<NamedSource> sources;
  if (!read_all(paths, sources, r.diagnostics)) {
    r.exit_code = 1;
    return r;
  }
  return simulate_sources(sources, options);
}

}  // namespace minivl
