// nugh: command-line front end. Flags only; every JSON report echoes the
// config so a result can be reproduced from its own header.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nugh/nugh.hpp"

namespace fs = std::filesystem;
using namespace nugh;

namespace {

struct Config {
  std::string command;
  std::string family = "geo";
  GHParams gh;
  std::vector<double> t;
  double tMin = -10.0, tMax = 10.0;
  std::string formula = "composed";
  double xMin = 0.0, xMax = 0.0;
  bool xRangeGiven = false;
  std::size_t points = 0;
  double tCutoff = 0.0;
  std::vector<double> q;
  std::size_t n = 10000;
  std::string method = "mixture";
  std::string law = "nugh";
  double linnikAlpha = 1.0;
  double p = 0.5;
  double index = 2.0;
  std::string side = "both";
  double windowLo = 0.995, windowHi = 0.9999;
  std::string input;
  std::string inputFormat = "returns";
  int starts = 5;
  bool freeLambda = false;
  std::uint64_t seed = Rng::kDefaultSeed;
  std::uint64_t stream = 0;
  std::string output;
  std::string format;
};

class ValidationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationFailure(message);
}

NuFamily familyOf(const std::string& name) {
  if (name == "geo") return NuFamily::geometric();
  if (name == "cheb") return NuFamily::chebyshev();
  throw ValidationFailure("--family must be geo or cheb");
}

std::string csvNumber(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", v);
  return buffer;
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::string csv() const {
    std::string out;
    for (std::size_t c = 0; c < columns.size(); ++c) out += (c ? "," : "") + columns[c];
    out += '\n';
    for (const auto& row : rows) {
      for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + csvNumber(row[c]);
      out += '\n';
    }
    return out;
  }

  Json json() const {
    Json out = Json::object();
    for (std::size_t c = 0; c < columns.size(); ++c) {
      Json column = Json::array();
      for (const auto& row : rows) column.push_back(row[c]);
      out[columns[c]] = std::move(column);
    }
    return out;
  }
};

Json configJson(const Config& c) {
  Json j{{"command", c.command}, {"family", c.family}, {"params", toJson(c.gh)}, {"seed", c.seed}, {"stream", c.stream}};
  if (c.command == "cf") {
    j["formula"] = c.formula;
    if (!c.t.empty()) j["t"] = c.t;
    else j["tRange"] = {c.tMin, c.tMax}, j["points"] = c.points;
  } else if (c.command == "pdf" || c.command == "cdf") {
    if (c.xRangeGiven) j["xRange"] = {c.xMin, c.xMax};
    j["points"] = c.points;
    j["tCutoff"] = c.tCutoff;
  } else if (c.command == "quantile") {
    j["q"] = c.q;
    j["tCutoff"] = c.tCutoff;
  } else if (c.command == "sample") {
    j["n"] = c.n;
    j["method"] = c.method;
    j["law"] = c.law;
    if (c.law == "linnik") j["linnikAlpha"] = c.linnikAlpha;
    if (c.method == "random-sum") j["p"] = c.p, j["index"] = c.index;
  } else if (c.command == "tails") {
    j["side"] = c.side;
    j["points"] = c.points;
    j["window"] = {c.windowLo, c.windowHi};
  } else if (c.command == "fit") {
    j["input"] = c.input;
    j["inputFormat"] = c.inputFormat;
    j["starts"] = c.starts;
    j["freeLambda"] = c.freeLambda;
  } else if (c.command == "check") {
    j.erase("params");
    j["n"] = c.n;
  }
  j["format"] = c.format;
  return j;
}

std::vector<double> tGrid(const Config& c) {
  if (!c.t.empty()) return c.t;
  return linspace(c.tMin, c.tMax, c.points);
}

XRange xRangeOf(const Config& c, const NuGHChar& spec) {
  if (c.xRangeGiven) return {c.xMin, c.xMax};
  const auto [mean, sd] = nuGHMeanStd(spec);
  return {mean - 40.0 * sd, mean + 40.0 * sd};
}

Law lawOf(const Config& c) {
  if (c.law == "nugh") return law::NuGH{familyOf(c.family), c.gh};
  if (c.law == "nig") return law::NIG{c.gh};
  if (c.law == "gaussian") return law::Gaussian{1.0};
  if (c.law == "laplace") return law::Laplace{};
  if (c.law == "hsecant") return law::HSecant{};
  if (c.law == "linnik") return law::Linnik{c.linnikAlpha};
  throw ValidationFailure("--law must be one of nugh, nig, gaussian, laplace, hsecant, linnik");
}

/// Validates flag combinations before any computation.
void validate(Config& c) {
  const bool jsonOnly = c.command == "check" || c.command == "tails" || c.command == "fit";
  if (c.format.empty()) c.format = jsonOnly ? "json" : "csv";
  require(c.format == "csv" || c.format == "json", "--format must be csv or json");
  require(!(jsonOnly && c.format == "csv"), c.command + " writes JSON only");
  if (c.command == "check") {
    require(c.family == "geo" || c.family == "cheb" || c.family == "all", "--family must be geo, cheb or all");
    require(c.n >= 1000, "--n must be at least 1000 for check");
    return;
  }
  if (c.command == "sample" && c.law != "nugh") {
    lawOf(c);
  } else {
    familyOf(c.family);
  }
  validateParams(c.gh);
  if (c.command == "cf") {
    require(c.formula == "composed" || c.formula == "closed", "--formula must be composed or closed");
    if (c.t.empty()) {
      if (c.points == 0) c.points = 201;
      require(c.tMin < c.tMax && c.points >= 2, "t-range needs t-min < t-max and at least 2 points");
    }
  } else if (c.command == "pdf" || c.command == "cdf") {
    if (c.points == 0) c.points = c.command == "pdf" ? 4096 : 101;
    require(!c.xRangeGiven || c.xMin < c.xMax, "x-range needs x-min < x-max");
    if (c.command == "cdf") require(c.points >= 2, "cdf needs at least 2 points");
    require(c.tCutoff >= 0.0, "--t-cutoff must be nonnegative");
  } else if (c.command == "quantile") {
    require(!c.q.empty(), "quantile needs --q");
    for (double q : c.q) require(q > 0.0 && q < 1.0, "--q values must lie in (0, 1)");
  } else if (c.command == "sample") {
    require(c.n >= 1, "--n must be positive");
    require(c.method == "mixture" || c.method == "random-sum", "--method must be mixture or random-sum");
    if (c.method == "random-sum") validateSpec({familyOf(c.family), c.p, c.index});
  } else if (c.command == "tails") {
    if (c.points == 0) c.points = 1u << 15;
    require(c.side == "left" || c.side == "right" || c.side == "both", "--side must be left, right or both");
    require(0.5 <= c.windowLo && c.windowLo < c.windowHi && c.windowHi < 1.0, "window must satisfy 0.5 <= lo < hi < 1");
  } else if (c.command == "fit") {
    require(!c.input.empty(), "fit needs --input");
    parseSeriesFormat(c.inputFormat);
    require(c.starts >= 1, "--starts must be positive");
  }
}

Table cfTable(const Config& c) {
  const NuFamily family = familyOf(c.family);
  const auto ts = tGrid(c);
  double cover = 8.0;
  for (double t : ts) cover = std::max(cover, std::abs(t));
  const NuGHChar spec(family, c.gh, cover);
  Table table{{"t", "re", "im"}, {}};
  for (double t : ts) {
    cplx g;
    if (c.formula == "closed")
      g = family.kind == FamilyKind::Geometric ? geoGHClosedForm(c.gh, t) : chebGHClosedForm(c.gh, t);
    else
      g = spec(t);
    table.rows.push_back({t, g.real(), g.imag()});
  }
  return table;
}

Table pdfTable(const Config& c) {
  const NuGHChar spec(familyOf(c.family), c.gh);
  const auto grid =
      pdfGrid([&spec](std::span<const double> ts) { return spec.evaluateGrid(ts); }, xRangeOf(c, spec), c.points,
              c.tCutoff);
  Table table{{"x", "pdf"}, {}};
  for (std::size_t i = 0; i < grid.x.size(); ++i) table.rows.push_back({grid.x[i], grid.pdf[i]});
  return table;
}

Table cdfTable(const Config& c) {
  const NuGHChar spec(familyOf(c.family), c.gh);
  const CFEvaluator cf = [&spec](double t) { return spec(t); };
  XRange range{c.xMin, c.xMax};
  if (!c.xRangeGiven) {
    const auto [mean, sd] = nuGHMeanStd(spec);
    range = {mean - 5.0 * sd, mean + 5.0 * sd};
  }
  Table table{{"x", "cdf"}, {}};
  for (double x : linspace(range.lo, range.hi, c.points)) table.rows.push_back({x, cdfAt(cf, x, c.tCutoff)});
  return table;
}

Table quantileTable(const Config& c) {
  const NuGHChar spec(familyOf(c.family), c.gh);
  const CFEvaluator cf = [&spec](double t) { return spec(t); };
  Table table{{"q", "x"}, {}};
  for (double q : c.q) table.rows.push_back({q, quantile(cf, q, c.tCutoff)});
  return table;
}

Table sampleTable(const Config& c) {
  Rng rng(c.seed, c.stream);
  const Law l = lawOf(c);
  const auto draws = c.method == "mixture"
                         ? sampleBase(l, c.n, rng)
                         : randomSumSample({familyOf(c.family), c.p, c.index}, samplerOf(l), c.n, rng);
  Table table{{"x"}, {}};
  for (double v : draws) table.rows.push_back({v});
  return table;
}

Json tailsJson(const Config& c) {
  const auto grid = nuGHDensity(familyOf(c.family), c.gh, {0.0, 0.0}, c.points);
  Json reports = Json::array();
  for (auto side : {TailSide::Left, TailSide::Right}) {
    if (c.side == "left" && side != TailSide::Left) continue;
    if (c.side == "right" && side != TailSide::Right) continue;
    reports.push_back(toJson(tailDiagnostic(grid, side, {c.windowLo, c.windowHi})));
  }
  return Json{{"method", inversionMethodName(grid.method)}, {"tails", std::move(reports)}};
}

Json fitJson(const Config& c) {
  const auto data = ingestSeries(c.input, parseSeriesFormat(c.inputFormat));
  FitOptions options;
  options.starts = c.starts;
  options.seed = c.seed;
  options.freeLambda = c.freeLambda;
  options.lambda = c.gh.lambda;
  const auto result = fitMLE(familyOf(c.family), data, options);
  if (!result.converged) std::cerr << "nugh: fit did not converge; reporting best point found\n";
  Json j = toJson(result);
  j["n"] = data.n();
  return j;
}

CheckReport checkReport(const Config& c) {
  CheckOptions options;
  if (c.family != "all") options.families = {familyOf(c.family)};
  options.seed = c.seed;
  options.streamId = c.stream;
  options.samples = c.n;
  return runChecks(options);
}

fs::path outputPath(const std::string& requested) {
  fs::path path(requested);
  if (path.is_relative()) {
    if (const char* dir = std::getenv("NUGH_OUTPUT_DIR"); dir && *dir) path = fs::path(dir) / path;
  }
  return path;
}

/// Writes to a sibling temporary file and renames it into place, so a
/// failed run never leaves a partial file behind.
void emit(const Config& c, const std::string& body) {
  if (c.output.empty() || c.output == "-") {
    std::cout << body;
    std::cout.flush();
    return;
  }
  const fs::path target = outputPath(c.output);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path temporary = target;
  temporary += ".partial";
  {
    std::ofstream out(temporary, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationFailure("cannot open output " + temporary.string());
    out << body;
    if (!out.flush()) {
      out.close();
      fs::remove(temporary);
      throw ValidationFailure("cannot write output " + temporary.string());
    }
  }
  fs::rename(temporary, target);
}

std::string render(const Config& c, const Table& table) {
  if (c.format == "csv") return table.csv();
  return reportEnvelope(c.command, configJson(c), table.json()).dump(2) + "\n";
}

int run(Config& c) {
  validate(c);
  if (c.command == "cf") emit(c, render(c, cfTable(c)));
  else if (c.command == "pdf") emit(c, render(c, pdfTable(c)));
  else if (c.command == "cdf") emit(c, render(c, cdfTable(c)));
  else if (c.command == "quantile") emit(c, render(c, quantileTable(c)));
  else if (c.command == "sample") emit(c, render(c, sampleTable(c)));
  else if (c.command == "tails") emit(c, reportEnvelope(c.command, configJson(c), tailsJson(c)).dump(2) + "\n");
  else if (c.command == "fit") emit(c, reportEnvelope(c.command, configJson(c), fitJson(c)).dump(2) + "\n");
  else if (c.command == "check") {
    const auto report = checkReport(c);
    emit(c, reportEnvelope(c.command, configJson(c), toJson(report)).dump(2) + "\n");
    if (!report.pass()) {
      for (const auto& i : report.items)
        if (!i.pass) std::cerr << "nugh: check failed: " << i.module << "::" << i.name << " (" << i.family << ")\n";
      return 2;
    }
  }
  return 0;
}

void addCommon(CLI::App* sub, Config& c, bool withParams = true) {
  sub->add_option("--seed", c.seed, "RNG seed")->capture_default_str();
  sub->add_option("--stream", c.stream, "RNG stream id")->capture_default_str();
  sub->add_option("-o,--output", c.output, "output file (stdout if omitted; relative paths honor NUGH_OUTPUT_DIR)");
  sub->add_option("--format", c.format, "csv or json");
  if (!withParams) return;
  sub->add_option("--family", c.family, "geo or cheb")->capture_default_str();
  sub->add_option("--lambda", c.gh.lambda)->capture_default_str();
  sub->add_option("--alpha", c.gh.alpha)->capture_default_str();
  sub->add_option("--beta", c.gh.beta)->capture_default_str();
  sub->add_option("--delta", c.gh.delta)->capture_default_str();
  sub->add_option("--mu", c.gh.mu)->capture_default_str();
}

void addXRange(CLI::App* sub, Config& c) {
  auto* lo = sub->add_option("--x-min", c.xMin)->each([&c](const std::string&) { c.xRangeGiven = true; });
  auto* hi = sub->add_option("--x-max", c.xMax);
  lo->needs(hi);
  hi->needs(lo);
  sub->add_option("--points", c.points);
  sub->add_option("--t-cutoff", c.tCutoff, "CF cutoff (0 picks one from the decay of the CF)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nu-generalized-hyperbolic distributions"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Config c;

  auto* cf = app.add_subcommand("cf", "characteristic function table");
  addCommon(cf, c);
  cf->add_option("--t", c.t, "evaluation points (overrides the t-range)");
  cf->add_option("--t-min", c.tMin)->capture_default_str();
  cf->add_option("--t-max", c.tMax)->capture_default_str();
  cf->add_option("--points", c.points);
  cf->add_option("--formula", c.formula, "composed or closed")->capture_default_str();

  auto* pdf = app.add_subcommand("pdf", "density on an FFT grid");
  addCommon(pdf, c);
  addXRange(pdf, c);

  auto* cdf = app.add_subcommand("cdf", "distribution function table");
  addCommon(cdf, c);
  addXRange(cdf, c);

  auto* qs = app.add_subcommand("quantile", "quantiles");
  addCommon(qs, c);
  qs->add_option("--q", c.q, "probabilities in (0, 1)")->required();
  qs->add_option("--t-cutoff", c.tCutoff);

  auto* sample = app.add_subcommand("sample", "random draws");
  addCommon(sample, c);
  sample->add_option("--n", c.n)->capture_default_str();
  sample->add_option("--method", c.method, "mixture or random-sum")->capture_default_str();
  sample->add_option("--law", c.law, "nugh, nig, gaussian, laplace, hsecant or linnik")->capture_default_str();
  sample->add_option("--linnik-alpha", c.linnikAlpha)->capture_default_str();
  sample->add_option("--p", c.p, "random-sum parameter")->capture_default_str();
  sample->add_option("--index", c.index, "random-sum scaling index")->capture_default_str();

  auto* tails = app.add_subcommand("tails", "log-density tail diagnostics");
  addCommon(tails, c);
  tails->add_option("--side", c.side, "left, right or both")->capture_default_str();
  tails->add_option("--points", c.points);
  tails->add_option("--window-lo", c.windowLo)->capture_default_str();
  tails->add_option("--window-hi", c.windowHi)->capture_default_str();

  auto* fit = app.add_subcommand("fit", "maximum-likelihood fit to a series");
  addCommon(fit, c);
  fit->add_option("--input", c.input, "single-column series file")->required();
  fit->add_option("--input-format", c.inputFormat, "returns or prices")->capture_default_str();
  fit->add_option("--starts", c.starts)->capture_default_str();
  fit->add_flag("--free-lambda", c.freeLambda);

  auto* check = app.add_subcommand("check", "property suite");
  addCommon(check, c, false);
  check->add_option("--family", c.family, "geo, cheb or all");
  check->add_option("--n", c.n, "Monte Carlo sample size");
  c.family = "geo";

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  for (auto* sub : app.get_subcommands()) c.command = sub->get_name();
  if (c.command == "check") {
    if (check->count("--family") == 0) c.family = "all";
    if (check->count("--n") == 0) c.n = 100000;
  }

  try {
    return run(c);
  } catch (const ValidationFailure& e) {
    std::cerr << "nugh: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    std::cerr << "nugh: " << e.what() << '\n';
    return e.isValidation() ? 1 : 2;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "nugh: " << e.what() << '\n';
    return 1;
  }
}
