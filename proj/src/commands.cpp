#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "ergo/config.hpp"
#include "ergo/errors.hpp"
#include "ergo/joinings.hpp"
#include "ergo/sigma.hpp"
#include "ergo/verify.hpp"

namespace ergo {

namespace {

namespace fs = std::filesystem;

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::InvalidArgument, "cannot write " + path.string());
  return out;
}

std::string axes_text(std::span<const std::size_t> axes) {
  std::string s;
  for (std::size_t i = 0; i < axes.size(); ++i) s += (i ? "," : "") + std::string("T") + std::to_string(axes[i] + 1);
  return s;
}

template <class S>
struct Context {
  const ExperimentConfig& cfg;
  fs::path out;
  std::uint64_t seed;
  std::size_t cap;
  std::ostream& log;
  FiniteSystem<S> sys;
  std::vector<std::size_t> axes;

  Observable<S> function(const std::string& name) const {
    for (const auto& [n, spec] : cfg.functions)
      if (n == name) return materialize_function<S>(spec, sys.size());
    fail(ErrorCode::InvalidArgument, "unknown function '" + name + "'");
  }
  std::vector<Observable<S>> functions() const {
    std::vector<Observable<S>> out;
    for (const auto& n : cfg.params.functions) out.push_back(function(n));
    return out;
  }
};

template <class S>
int cmd_validate(Context<S>& c) {
  auto all = all_axes(c.sys.dim());
  auto comps = ergodic_decomposition(c.sys, all);
  c.log << "valid system: m=" << c.sys.size() << " d=" << c.sys.dim() << " support=" << c.sys.support().size() << "\n";
  c.log << "ergodic components: " << comps.size() << "\n";
  auto periods = joint_period(c.sys, all);
  for (std::size_t i = 0; i < periods.size(); ++i) c.log << "period of T" << i + 1 << ": " << periods[i] << "\n";
  if (comps.size() > 1)
    c.log << "warning: not ergodic; cube measures are formed over the whole system, not per component\n";
  return 0;
}

template <class S>
int cmd_seminorm(Context<S>& c) {
  auto refs = transform_refs(c.axes);
  auto cube = host_measure(c.sys, refs, c.cap);
  std::vector<std::pair<std::string, Observable<S>>> fns;
  if (c.cfg.params.functions.empty()) {
    auto family = default_family(c.sys, c.axes);
    for (std::size_t i = 0; i < family.size(); ++i) fns.emplace_back("family" + std::to_string(i), family[i]);
  } else {
    for (const auto& n : c.cfg.params.functions) fns.emplace_back(n, c.function(n));
  }
  auto out = open_output(c.out / "seminorm.csv");
  out << "function,power,seminorm,zero\n";
  for (const auto& [name, f] : fns) {
    S p = seminorm_power(cube, f);
    out << name << ',' << format_scalar(p) << ',' << format_scalar(seminorm_from_power(p, c.axes.size())) << ','
        << (seminorm_power_is_zero(p) ? "yes" : "no") << '\n';
  }
  auto mr = is_magic(c.sys, c.axes, c.cap);
  c.log << "cube measure over " << axes_text(c.axes) << ": " << cube.size() << " rows\n";
  c.log << "magic: " << (mr.magic ? "yes" : "no");
  if (!mr.magic) c.log << " (witness seminorm power " << format_scalar(mr.witness_power) << ")";
  c.log << "\nwrote " << (c.out / "seminorm.csv").string() << "\n";
  return 0;
}

template <class S>
int cmd_host_measure(Context<S>& c) {
  auto cube = host_measure(c.sys, transform_refs(c.axes), c.cap);
  auto out = open_output(c.out / "host_measure.txt");
  write_joining(out, cube);
  c.log << "cube measure over " << axes_text(c.axes) << ": " << cube.size() << " rows\nwrote "
        << (c.out / "host_measure.txt").string() << "\n";
  return 0;
}

template <class S>
int cmd_cube_extension(Context<S>& c) {
  auto ext = cube_extension(c.sys, c.axes, c.cap);
  auto base = is_magic(c.sys, c.axes, c.cap);
  auto lifted = is_magic(ext.system, c.axes, c.cap);
  ExperimentConfig next;
  next.command = "verify";
  next.mode = c.cfg.mode;
  next.seed = c.seed;
  next.cap = c.cap;
  SystemSpec spec;
  spec.points = ext.system.size();
  spec.transforms = ext.system.transforms();
  for (const auto& w : ext.system.weights()) spec.weights.push_back(format_scalar(w));
  next.system = spec;
  for (std::size_t a : c.axes) next.params.subset.push_back(a + 1);
  {
    auto out = open_output(c.out / "cube_extension.yaml");
    out << serialize_config(next);
  }
  {
    auto out = open_output(c.out / "cube_extension_measure.txt");
    write_joining(out, ext.measure);
  }
  {
    auto out = open_output(c.out / "cube_extension_factor.txt");
    for (Point u = 0; u < ext.factor_map.size(); ++u) out << u << ' ' << ext.factor_map[u] << '\n';
  }
  c.log << "extension: " << ext.system.size() << " points\n";
  c.log << "base magic: " << (base.magic ? "yes" : "no");
  if (!base.magic) c.log << " (witness seminorm power " << format_scalar(base.witness_power) << ")";
  c.log << "\nextension magic: " << (lifted.magic ? "yes" : "no") << "\n";
  return 0;
}

template <class S>
int cmd_furstenberg(Context<S>& c) {
  auto joining = furstenberg_joining(c.sys, c.cap);
  {
    auto out = open_output(c.out / "furstenberg.txt");
    write_joining(out, joining);
  }
  Point x = c.cfg.params.x;
  if (x >= c.sys.size()) fail(ErrorCode::InvalidArgument, "x out of range");
  auto px = pointwise_joining(c.sys, x);
  {
    auto out = open_output(c.out / "pointwise.txt");
    write_joining(out, px);
  }
  c.log << "joining: " << joining.size() << " rows; pointwise joining at x=" << x << ": " << px.size() << " rows\n";
  return 0;
}

template <class S>
int cmd_average(Context<S>& c) {
  auto kind = *parse_average_kind(c.cfg.params.kind);
  std::vector<std::uint64_t> grid = c.cfg.params.grid.empty() ? default_grid() : c.cfg.params.grid;
  AverageSpec<S> spec;
  spec.kind = kind;
  spec.x = c.cfg.params.x;
  spec.functions = c.functions();
  std::size_t d = c.sys.dim();
  std::size_t vertices = std::size_t{1} << d;
  if (kind == AverageKind::Cubic && spec.functions.size() + 1 == vertices)
    spec.functions.insert(spec.functions.begin(), Observable<S>{});
  if (kind == AverageKind::SSigma) {
    spec.sigma = c.cfg.params.sigma.empty() ? CubeIndex::all_ones(static_cast<unsigned>(d))
                                            : CubeIndex::parse(c.cfg.params.sigma);
  }
  auto report = convergence_report(c.sys, spec, grid, c.cap);
  auto out = open_output(c.out / "average.csv");
  write_report_csv(out, report);
  c.log << average_kind_name(kind) << " average at x=" << spec.x << ": last value "
        << format_scalar(report.values.back());
  if (report.exact_limit) c.log << ", exact limit " << format_scalar(*report.exact_limit);
  c.log << (report.converged ? " (reached)" : "") << "\nwrote " << (c.out / "average.csv").string() << "\n";
  return 0;
}

template <class S>
int cmd_verify(Context<S>& c) {
  SuiteOptions opts;
  opts.axes = c.axes;
  opts.nmax = c.cfg.params.nmax;
  opts.seed = c.seed;
  opts.cap = c.cap;
  auto user = c.functions();
  auto reports = run_verify_suite<S>(c.sys, user, opts);
  auto out = open_output(c.out / "checks.jsonl");
  bool failed = false;
  for (const auto& r : reports) {
    write_check_records(out, r);
    c.log << status_name(r.status) << "  " << r.name << "  (" << r.assertions.size() << " assertions";
    if (r.failed()) c.log << ", " << r.failures() << " failed: " << r.witness;
    c.log << ")\n";
    for (const auto& n : r.notes) c.log << "    note: " << n << "\n";
    failed = failed || r.failed();
  }
  c.log << "wrote " << (c.out / "checks.jsonl").string() << "\n";
  return failed ? 5 : 0;
}

template <class S>
int run_typed(const ExperimentConfig& cfg, const fs::path& out, std::uint64_t seed, std::size_t cap,
              std::ostream& log) {
  if (!cfg.system) fail(ErrorCode::InvalidArgument, "command '" + cfg.command + "' needs a system");
  Limits limits;
  limits.max_support = cap;
  Context<S> c{cfg, out, seed, cap, log, generate_system<S>(*cfg.system, limits, seed), {}};
  if (cfg.params.subset.empty()) {
    c.axes = all_axes(c.sys.dim());
  } else {
    for (std::size_t a : cfg.params.subset) {
      if (a == 0 || a > c.sys.dim())
        fail(ErrorCode::AxisOutOfRange, "subset entry " + std::to_string(a) + " out of range 1.." +
                                            std::to_string(c.sys.dim()));
      c.axes.push_back(a - 1);
    }
  }
  const std::string& cmd = cfg.command;
  if (cmd == "validate") return cmd_validate(c);
  if (cmd == "seminorm") return cmd_seminorm(c);
  if (cmd == "host-measure") return cmd_host_measure(c);
  if (cmd == "cube-extension") return cmd_cube_extension(c);
  if (cmd == "furstenberg") return cmd_furstenberg(c);
  if (cmd == "average") return cmd_average(c);
  if (cmd == "verify") return cmd_verify(c);
  fail(ErrorCode::InvalidArgument, "unknown command '" + cmd + "'");
}

int run_stream(const ExperimentConfig& cfg, const fs::path& out, std::ostream& log) {
  const StreamSpec& s = *cfg.stream;
  StreamSystem stream = s.generator == "rotations" ? rotation_stream(s.alphas) : skew_stream(s.alpha, s.beta);
  auto kind = *parse_average_kind(cfg.params.kind);
  if (kind != AverageKind::Multiple && kind != AverageKind::Cubic)
    fail(ErrorCode::InvalidArgument, "stream mode supports multiple and cubic averages");
  std::vector<double> x0 = s.x0.empty() ? std::vector<double>(stream.space_dim, 0.0) : s.x0;
  std::vector<StreamFunction> fns = s.functions;
  std::size_t d = stream.maps.size();
  if (kind == AverageKind::Cubic && fns.size() + 1 == (std::size_t{1} << d)) fns.insert(fns.begin(), StreamFunction{});
  std::vector<std::uint64_t> grid = cfg.params.grid.empty() ? default_grid() : cfg.params.grid;
  auto report = stream_average(stream, kind, fns, x0, grid);
  auto file = open_output(out / "average.csv");
  write_report_csv(file, report);
  log << "stream " << average_kind_name(kind) << " average: last value " << format_scalar(report.values.back())
      << ", tail " << format_scalar(report.tail.front()) << "\nwrote " << (out / "average.csv").string() << "\n";
  return 0;
}

int run_demo(const RunOptions& options, std::ostream& log) {
  int status = 0;
  auto e3 = parse_config(
      "version: 1\ncommand: verify\nsystem: \"cyclic_rotations q=4 steps=[1,2]\"\n"
      "functions:\n  f: {values: [1, 0, -1, 0]}\nparams: {functions: [f, f]}\n");
  RunOptions sub = options;
  sub.out_dir = (fs::path(options.out_dir) / "e3_verify").string();
  log << "== E3 verify\n";
  status = std::max(status, run_command(e3, sub, log));
  auto e4 = parse_config(
      "version: 1\ncommand: average\nsystem: \"cyclic_rotations q=4 steps=[1,3]\"\n"
      "functions:\n  f: {indicator: 0}\n"
      "params: {kind: averaged_multiple, functions: [f, f], grid: [1, 2, 4, 8, 16, 32, 64]}\n");
  sub.out_dir = (fs::path(options.out_dir) / "e4_average").string();
  log << "== E4 averaged multiple average\n";
  status = std::max(status, run_command(e4, sub, log));
  return status;
}

}  // namespace

int run_command(const ExperimentConfig& cfg, const RunOptions& options, std::ostream& log) {
  if (cfg.command == "demo") return run_demo(options, log);
  fs::path out(options.out_dir);
  fs::create_directories(out);
  ArithmeticMode mode = options.mode.value_or(cfg.mode);
  std::uint64_t seed = options.seed.value_or(cfg.seed);
  std::size_t cap = options.cap.value_or(cfg.cap);
  if (cfg.stream && !cfg.system) {
    if (cfg.command != "average") fail(ErrorCode::InvalidArgument, "stream configs support only the average command");
    return run_stream(cfg, out, log);
  }
  if (mode == ArithmeticMode::Float) return run_typed<double>(cfg, out, seed, cap, log);
  return run_typed<Rational>(cfg, out, seed, cap, log);
}

}  // namespace ergo
