// Command-line workbench: evaluates parameter sweeps of the random-generator
// phase channel and emits plot-ready CSV/JSON tables.

#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qmetro/channel.hpp"
#include "qmetro/single_qubit.hpp"
#include "qmetro/strategy.hpp"
#include "qmetro/two_qubit.hpp"

namespace {

using namespace qmetro;

constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumerical = 4;

struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Range {
  double min;
  double max;
  int count;

  double at(int i) const {
    return count < 2 ? min : min + (max - min) * double(i) / double(count - 1);
  }
};

Range parse_range(const std::string& text) {
  Range r{};
  char extra = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%d%c", &r.min, &r.max, &r.count,
                  &extra) != 3)
    throw std::domain_error("range must have the form min:max:count");
  return r;
}

struct Options {
  std::optional<double> phi;
  std::optional<double> kappa;
  std::optional<Range> phi_range;
  std::optional<Range> kappa_range;
  std::optional<int> n_max;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<int> threads;

  double need_phi() const {
    if (!phi) throw std::domain_error("--phi is required");
    return *phi;
  }
  double need_kappa() const {
    if (!kappa) throw std::domain_error("--kappa is required");
    return *kappa;
  }
  Range phi_grid() const { return phi_range.value_or(Range{0.05, 0.7, 101}); }
  Range kappa_grid() const {
    return kappa_range.value_or(Range{0.5, 10.0, 101});
  }
  int scan_cap() const { return n_max.value_or(2000); }
  std::string sink() const { return out.value_or("-"); }
  std::string table_format() const { return format.value_or("csv"); }
  int worker_count() const { return threads.value_or(0); }
};

void merge_config(Options& opt, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config file: " + path);
  nlohmann::json cfg;
  try {
    in >> cfg;
  } catch (const nlohmann::json::exception& e) {
    throw std::domain_error(std::string("config parse error: ") + e.what());
  }
  const auto range_of = [](const nlohmann::json& j) {
    if (j.is_string()) return parse_range(j.get<std::string>());
    if (j.is_array() && j.size() == 3)
      return Range{j[0].get<double>(), j[1].get<double>(), j[2].get<int>()};
    throw std::domain_error("config range must be \"a:b:n\" or [a, b, n]");
  };
  // flags win on conflict: fill only what the command line left unset
  if (!opt.phi && cfg.contains("phi")) opt.phi = cfg["phi"].get<double>();
  if (!opt.kappa && cfg.contains("kappa"))
    opt.kappa = cfg["kappa"].get<double>();
  if (!opt.phi_range && cfg.contains("phi_range"))
    opt.phi_range = range_of(cfg["phi_range"]);
  if (!opt.kappa_range && cfg.contains("kappa_range"))
    opt.kappa_range = range_of(cfg["kappa_range"]);
  if (!opt.n_max && cfg.contains("n_max")) opt.n_max = cfg["n_max"].get<int>();
  if (!opt.out && cfg.contains("out"))
    opt.out = cfg["out"].get<std::string>();
  if (!opt.format && cfg.contains("format"))
    opt.format = cfg["format"].get<std::string>();
  if (!opt.threads && cfg.contains("threads"))
    opt.threads = cfg["threads"].get<int>();
}

void validate_grid(const Range& r, double lo, double hi, const char* what) {
  if (r.count < 2)
    throw std::domain_error(std::string(what) + ": count must be >= 2");
  if (!(r.min <= r.max))
    throw std::domain_error(std::string(what) + ": min must not exceed max");
  if (!(r.min >= lo && r.max <= hi))
    throw std::domain_error(std::string(what) + ": range outside valid domain");
}

// --- table assembly and serialization ------------------------------------

enum class Cell { Number, Integer, Text };

struct Table {
  std::vector<std::string> columns;
  std::vector<Cell> kinds;
  std::vector<std::vector<std::string>> rows;
};

std::string fmt_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.11e", v);  // 12 significant digits
  return buf;
}

std::string fmt_integer(long v) { return std::to_string(v); }

void write_csv(std::ostream& os, const Table& t) {
  for (size_t c = 0; c < t.columns.size(); ++c)
    os << t.columns[c] << (c + 1 < t.columns.size() ? ',' : '\n');
  for (const auto& row : t.rows)
    for (size_t c = 0; c < row.size(); ++c)
      os << row[c] << (c + 1 < row.size() ? ',' : '\n');
}

void write_json(std::ostream& os, const Table& t) {
  os << "[\n";
  for (size_t r = 0; r < t.rows.size(); ++r) {
    os << "  {";
    for (size_t c = 0; c < t.columns.size(); ++c) {
      os << '"' << t.columns[c] << "\": ";
      if (t.kinds[c] == Cell::Text)
        os << '"' << t.rows[r][c] << '"';
      else
        os << t.rows[r][c];
      if (c + 1 < t.columns.size()) os << ", ";
    }
    os << (r + 1 < t.rows.size() ? "},\n" : "}\n");
  }
  os << "]\n";
}

void emit(const Table& t, const Options& opt) {
  const std::string format = opt.table_format();
  if (format != "csv" && format != "json")
    throw std::domain_error("--format must be csv or json");
  const std::string sink = opt.sink();
  const auto write = [&](std::ostream& os) {
    format == "csv" ? write_csv(os, t) : write_json(os, t);
    os.flush();
    if (!os) throw io_error("write failed: " + sink);
  };
  if (sink == "-") {
    write(std::cout);
  } else {
    std::ofstream os(sink, std::ios::binary);  // LF line endings everywhere
    if (!os) throw io_error("cannot open output file: " + sink);
    write(os);
  }
}

/// Runs fn(0..count-1) on a worker pool. Row slots are preassigned, so the
/// result is independent of the thread count.
void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  if (threads <= 0) threads = int(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      try {
        for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1))
          fn(i);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
      }
    });
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

// --- subcommands ----------------------------------------------------------

void cmd_scalars(const Options& opt) {
  const ChannelParams params{opt.need_phi(), opt.need_kappa()};
  const ChannelScalars s = channel_scalars(params);
  Table t;
  t.columns = {"phi",        "kappa",       "b",
               "c_re",       "c_im",        "lambda_par",
               "lambda_perp", "g",          "db_dphi",
               "db_dkappa",  "dc_dphi_re",  "dc_dphi_im",
               "dc_dkappa_re", "dc_dkappa_im"};
  t.kinds.assign(t.columns.size(), Cell::Number);
  t.rows.push_back({fmt_number(params.phi), fmt_number(params.kappa),
                    fmt_number(s.b), fmt_number(s.c.real()),
                    fmt_number(s.c.imag()), fmt_number(s.lambda_par),
                    fmt_number(s.lambda_perp), fmt_number(s.g),
                    fmt_number(s.db_dphi), fmt_number(s.db_dkappa),
                    fmt_number(s.dc_dphi.real()), fmt_number(s.dc_dphi.imag()),
                    fmt_number(s.dc_dkappa.real()),
                    fmt_number(s.dc_dkappa.imag())});
  emit(t, opt);
}

struct GridPoint {
  double phi;
  double kappa;
};

template <class RowFn>
Table grid_table(const Options& opt, std::vector<std::string> columns,
                 std::vector<Cell> kinds, RowFn&& row_fn) {
  const Range pr = opt.phi_grid();
  const Range kr = opt.kappa_grid();
  validate_grid(pr, 0.0, std::numbers::pi, "--phi-range");
  validate_grid(kr, 1e-12, 1e12, "--kappa-range");
  Table t;
  t.columns = std::move(columns);
  t.kinds = std::move(kinds);
  t.rows.resize(size_t(pr.count) * kr.count);
  parallel_for(pr.count * kr.count, opt.worker_count(), [&](int index) {
    const GridPoint p{pr.at(index / kr.count), kr.at(index % kr.count)};
    t.rows[index] = row_fn(p);
  });
  return t;
}

void cmd_single_map(const Options& opt) {
  emit(grid_table(
           opt, {"phi", "kappa", "theta_opt_sim", "theta_opt_kappa", "R1"},
           {Cell::Number, Cell::Number, Cell::Number, Cell::Number,
            Cell::Number},
           [](const GridPoint& p) {
             const ChannelParams params{p.phi, p.kappa};
             const ScalarMinimum tp =
                 optimal_theta(params, Target::PhiIndividual);
             const ScalarMinimum tk =
                 optimal_theta(params, Target::KappaIndividual);
             const ScalarMinimum ts =
                 optimal_theta(params, Target::Simultaneous);
             const double r1 =
                 (1.0 / tp.value + 1.0 / tk.value) / (0.5 * ts.value);
             return std::vector<std::string>{
                 fmt_number(p.phi), fmt_number(p.kappa),
                 fmt_number(ts.argument), fmt_number(tk.argument),
                 fmt_number(r1)};
           }),
       opt);
}

void cmd_two_map(const Options& opt) {
  emit(grid_table(
           opt, {"phi", "kappa", "alpha_phi", "alpha_kappa", "alpha_sim", "R2"},
           {Cell::Number, Cell::Number, Cell::Number, Cell::Number,
            Cell::Number, Cell::Number},
           [](const GridPoint& p) {
             const ChannelParams params{p.phi, p.kappa};
             const AlphaOptimum ap =
                 optimal_alpha(params, Target::PhiIndividual);
             const AlphaOptimum ak =
                 optimal_alpha(params, Target::KappaIndividual);
             const AlphaOptimum as =
                 optimal_alpha(params, Target::Simultaneous);
             const double r2 = (1.0 / ap.objective + 1.0 / ak.objective) /
                               (0.5 * as.objective);
             return std::vector<std::string>{
                 fmt_number(p.phi), fmt_number(p.kappa), fmt_number(ap.alpha),
                 fmt_number(ak.alpha), fmt_number(as.alpha), fmt_number(r2)};
           }),
       opt);
}

void cmd_ghz_curves(const Options& opt) {
  const ChannelParams params{opt.need_phi(), opt.need_kappa()};
  validate(params);
  const int n_max = opt.scan_cap();
  if (n_max < 1) throw std::domain_error("--n-max must be >= 1");
  const ChannelScalars s = channel_scalars(params);
  const double unit = sql_unit(params);
  Table t;
  t.columns = {"N", "delta_ind", "delta_sim", "delta_sql", "R"};
  t.kinds = {Cell::Integer, Cell::Number, Cell::Number, Cell::Number,
             Cell::Number};
  t.rows.reserve(n_max);
  for (int n = 1; n <= n_max; ++n) {
    const QfiMatrix f = qfim_ghz(n, s);
    const double ind = delta_individual(f);
    const double sim = delta_simultaneous(f);
    t.rows.push_back({fmt_integer(n), fmt_number(ind), fmt_number(sim),
                      fmt_number(unit / (2.0 * n)), fmt_number(ind / sim)});
  }
  emit(t, opt);
}

void cmd_nopt_map(const Options& opt) {
  const int n_max = opt.scan_cap();
  if (n_max < 1) throw std::domain_error("--n-max must be >= 1");
  emit(grid_table(
           opt, {"phi", "kappa", "n_opt", "delta_min", "winner", "case_label"},
           {Cell::Number, Cell::Number, Cell::Integer, Cell::Number,
            Cell::Text, Cell::Text},
           [n_max](const GridPoint& p) {
             const StrategyReport rep =
                 strategy_report({p.phi, p.kappa}, n_max);
             return std::vector<std::string>{
                 fmt_number(p.phi), fmt_number(p.kappa),
                 fmt_integer(rep.n_opt), fmt_number(rep.delta_min),
                 to_string(rep.winner), to_string(rep.case_label)};
           }),
       opt);
}

void cmd_msat(const Options& opt) {
  const ChannelParams params{opt.need_phi(), opt.need_kappa()};
  validate(params);
  const long n_total = opt.scan_cap();  // --n-max is the application budget
  if (n_total < 1) throw std::domain_error("--n-max must be >= 1");
  const MSatCurve curve = m_saturation_curve(params, n_total);
  Table t;
  t.columns = {"M", "delta", "ratio_to_full"};
  t.kinds = {Cell::Integer, Cell::Number, Cell::Number};
  for (const MSatPoint& p : curve.points)
    t.rows.push_back({fmt_integer(p.m), fmt_number(p.delta),
                      fmt_number(p.ratio_to_full)});
  emit(t, opt);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "qmetro: multiparameter estimation workbench for the "
      "random-generator phase channel"};
  app.require_subcommand(1);

  Options opt;
  std::string config_path;
  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--phi", opt.phi, "phase shift, radians");
    cmd->add_option("--kappa", opt.kappa, "vMF concentration");
    cmd->add_option_function<std::string>(
        "--phi-range",
        [&opt](const std::string& s) { opt.phi_range = parse_range(s); },
        "phi grid as min:max:count");
    cmd->add_option_function<std::string>(
        "--kappa-range",
        [&opt](const std::string& s) { opt.kappa_range = parse_range(s); },
        "kappa grid as min:max:count");
    cmd->add_option("--n-max", opt.n_max,
                    "probe-size scan cap (msat: total applications)");
    cmd->add_option("--out", opt.out, "output path, - for stdout");
    cmd->add_option("--format", opt.format, "csv or json");
    cmd->add_option("--threads", opt.threads, "worker threads, 0 = auto");
    cmd->add_option("--config", config_path, "JSON config file; flags win");
    return cmd;
  };

  CLI::App* scalars =
      add_common(app.add_subcommand("scalars", "channel scalars at one point"));
  CLI::App* single_map = add_common(app.add_subcommand(
      "single-map", "optimal single-qubit probes and ratio over a grid"));
  CLI::App* two_map = add_common(app.add_subcommand(
      "two-map", "optimal two-qubit probes and ratio over a grid"));
  CLI::App* ghz_curves = add_common(app.add_subcommand(
      "ghz-curves", "strategy errors against the GHZ probe size"));
  CLI::App* nopt_map = add_common(app.add_subcommand(
      "nopt-map", "optimal probe size and regime label over a grid"));
  CLI::App* msat = add_common(app.add_subcommand(
      "msat", "hybrid-scheme error against the entangled block size"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (!config_path.empty()) merge_config(opt, config_path);
    if (scalars->parsed()) cmd_scalars(opt);
    if (single_map->parsed()) cmd_single_map(opt);
    if (two_map->parsed()) cmd_two_map(opt);
    if (ghz_curves->parsed()) cmd_ghz_curves(opt);
    if (nopt_map->parsed()) cmd_nopt_map(opt);
    if (msat->parsed()) cmd_msat(opt);
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
