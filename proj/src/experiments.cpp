#include "freelab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>

#include "freelab/det_approx.hpp"
#include "freelab/errors.hpp"
#include "freelab/expression.hpp"
#include "freelab/fit.hpp"
#include "freelab/montecarlo.hpp"
#include "freelab/observables.hpp"
#include "freelab/wigner.hpp"

namespace freelab {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

json pair_json(cplx v) { return json::array({v.real(), v.imag()}); }

json ensemble_json(const EnsembleSpec& e) {
  return {{"symmetry", to_string(e.symmetry)},
          {"offdiag_law", to_string(e.offdiag_law)},
          {"diag_law", to_string(e.diag_law)},
          {"diag_variance", e.effective_diag_variance()},
          {"pseudo_variance", e.offdiag_pseudo_variance}};
}

struct RunSettings {
  std::uint64_t seed;
  std::size_t workers;
  bool timing;
};

RunSettings run_settings(const RunConfig& cfg) {
  const auto workers = cfg.get_int("run.workers");
  if (workers < 0) throw ValidationError("run.workers must be non-negative");
  return {cfg.get_uint("run.seed"), resolve_workers(static_cast<std::size_t>(workers)), cfg.get_bool("run.timing")};
}

std::pair<Vector, Vector> test_vectors(const std::string& kind, Eigen::Index n, std::uint64_t seed) {
  if (kind == "basis") return {unit_vector(n, 0), unit_vector(n, 1)};
  if (kind == "same") return {unit_vector(n, 0), unit_vector(n, 0)};
  if (kind == "random") return random_unit_pair(n, seed);
  throw ValidationError("unknown vector choice '" + kind + "' (expected basis, same or random)");
}

std::size_t positive_count(std::int64_t v, const char* key) {
  if (v < 2) throw ValidationError(std::string(key) + " must be at least 2");
  return static_cast<std::size_t>(v);
}

// Rotations into one sample's eigenbasis, shared between chains. A matrix is
// rotated through its traceless part, so U^* A U = U^* (A - <A>) U + <A> I;
// multiples of the identity cost nothing and matrices with equal traceless
// parts share one rotation.
class RotationCache {
 public:
  explicit RotationCache(const WignerSample& s) : s_(s) {}

  std::shared_ptr<const Matrix> get(const Matrix& a) {
    for (const auto& e : done_)
      if (e.source == &a) return e.full;
    const cplx tr = normalized_trace(a);
    Matrix centered = a;
    centered.diagonal().array() -= tr;
    std::shared_ptr<const Matrix> base;
    for (const auto& e : done_)
      if (e.centered == centered) base = e.rotated_centered;
    if (!base)
      base = std::make_shared<const Matrix>(centered.isZero(0.0) ? Matrix::Zero(a.rows(), a.cols())
                                                                 : s_.rotate(centered));
    Matrix r = *base;
    r.diagonal().array() += tr;
    auto full = std::make_shared<const Matrix>(std::move(r));
    done_.push_back({&a, std::move(centered), base, full});
    return full;
  }

 private:
  struct Entry {
    const Matrix* source;
    Matrix centered;
    std::shared_ptr<const Matrix> rotated_centered;
    std::shared_ptr<const Matrix> full;
  };
  const WignerSample& s_;
  std::vector<Entry> done_;
};

Eigen::VectorXcd exp_values(const WignerSample& s, double time) {
  return spectral_values(s, [time](double x) { return std::exp(cplx(0.0, time * x)); });
}

// Spectral vectors memoized by parameter within one sample.
template <class Key, class Make>
class SpectralMemo {
 public:
  explicit SpectralMemo(Make make) : make_(std::move(make)) {}
  const Eigen::VectorXcd& get(Key key) {
    auto it = memo_.find(key);
    if (it == memo_.end()) it = memo_.emplace(key, make_(key)).first;
    return it->second;
  }

 private:
  struct Less {
    bool operator()(const cplx& a, const cplx& b) const {
      return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
    }
    bool operator()(double a, double b) const { return a < b; }
  };
  Make make_;
  std::map<Key, Eigen::VectorXcd, Less> memo_;
};

Statistic abs_deviation(const MonteCarloResult& mc, std::size_t c, cplx pred) {
  std::vector<cplx> v;
  v.reserve(mc.per_sample.size());
  for (const auto& row : mc.per_sample) v.emplace_back(std::abs(row[c] - pred), 0.0);
  return summarize(v);
}

Matrix matrix_power(const Matrix& a, std::int64_t p) {
  if (p < 1) throw ValidationError("polynomial degrees must be at least 1");
  Matrix r = a;
  for (std::int64_t i = 1; i < p; ++i) r = r * a;
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------

Eigen::MatrixXcd resolve_observable(const std::string& descriptor, Eigen::Index n) {
  if (!descriptor.empty() && descriptor.front() == '@') {
    const std::string path = descriptor.substr(1);
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open observable file '" + path + "'");
    Matrix a = read_observable(in);
    if (a.rows() != n)
      throw ValidationError("observable file '" + path + "' has dimension " + std::to_string(a.rows()) + ", expected " +
                            std::to_string(n));
    return a;
  }
  return named_observable(descriptor, n);
}

cplx parse_complex(const std::string& raw) {
  std::string text;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) text += c;
  auto number = [&raw](const std::string& s) {
    if (s.empty() || s == "+") return 1.0;
    if (s == "-") return -1.0;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || used == 0) throw ValidationError("malformed complex number '" + raw + "'");
    return v;
  };
  if (text.empty()) throw ValidationError("empty complex number");
  if (text.back() != 'i') return {number(text), 0.0};
  const std::string body = text.substr(0, text.size() - 1);
  // Split at the last sign that is not leading and not part of an exponent.
  std::size_t split = std::string::npos;
  for (std::size_t i = body.size(); i-- > 1;)
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;
      break;
    }
  if (split == std::string::npos) return {0.0, number(body)};
  return {number(body.substr(0, split)), number(body.substr(split))};
}

std::vector<std::string> run_header(const RunConfig& config, const std::string& command) {
  const std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  std::vector<std::string> h = {"freelab " + command, std::string("created ") + stamp};
  for (auto& line : config.effective_lines()) h.push_back(line);
  return h;
}

std::string write_run(const RunConfig& config, const std::string& command, const std::vector<ExperimentRecord>& records) {
  const std::string format = config.get("run.format");
  if (format != "csv" && format != "json") throw ValidationError("run.format must be csv or json");
  const std::filesystem::path dir = config.get("run.out");
  std::filesystem::create_directories(dir);
  const auto header = run_header(config, command);
  const auto data = dir / (command + "." + format);
  {
    std::ofstream out(data);
    if (!out) throw ValidationError("cannot write '" + data.string() + "'");
    if (format == "csv")
      write_csv(out, header, records);
    else
      write_json(out, header, records);
  }
  std::ofstream summary(dir / (command + "_summary.txt"));
  for (const auto& h : header) summary << "# " << h << '\n';
  write_summary(summary, records);
  return data.string();
}

// ---------------------------------------------------------------------------

std::vector<ExperimentRecord> run_locallaw(const RunConfig& cfg) {
  const RunSettings run = run_settings(cfg);
  const auto ns = cfg.get_ints("locallaw.n");
  const auto etas = cfg.get_doubles("locallaw.eta");
  const auto ks = cfg.get_ints("locallaw.k");
  const auto sample_counts = cfg.get_ints("locallaw.samples");
  if (ns.empty() || etas.empty() || ks.empty()) throw ValidationError("locallaw grids (n, eta, k) must be nonempty");
  if (sample_counts.size() != 1 && sample_counts.size() != ns.size())
    throw ValidationError("locallaw.samples must hold one count or one per entry of locallaw.n");
  for (double eta : etas)
    if (!(eta > 0.0)) throw ValidationError("locallaw.eta values must be positive");
  for (auto k : ks)
    if (k < 1 || k > static_cast<std::int64_t>(kPartitionRouteCap))
      throw SizeLimitError("locallaw chain order", static_cast<std::size_t>(std::max<std::int64_t>(k, 0)),
                           kPartitionRouteCap);
  const double energy = cfg.get_double("locallaw.energy");
  const bool alternate = cfg.get_bool("locallaw.conjugate_alternate");
  const bool isotropic = cfg.get_bool("locallaw.isotropic");
  const std::string obs_name = cfg.get("locallaw.observable"), final_name = cfg.get("locallaw.final_observable");
  const std::string vectors = cfg.get("locallaw.vectors");
  const SeedPlan plan{run.seed};

  struct Point {
    double eta;
    std::size_t k;
    std::vector<cplx> z;
    cplx pred_av, pred_iso;
  };
  struct Summary {
    std::int64_t n;
    double eta;
    std::size_t k;
    double av_abs, iso_abs;
  };
  std::vector<ExperimentRecord> records;
  std::vector<Summary> summaries;
  std::size_t total_samples = 0;

  for (std::size_t gi = 0; gi < ns.size(); ++gi) {
    const auto n_dim = static_cast<Eigen::Index>(ns[gi]);
    const std::size_t n_samples =
        positive_count(sample_counts.size() == 1 ? sample_counts[0] : sample_counts[gi], "locallaw.samples");
    total_samples += n_samples;
    const EnsembleSpec spec = cfg.ensemble(static_cast<std::size_t>(ns[gi]));
    const Matrix a = resolve_observable(obs_name, n_dim);
    const Matrix a_final = resolve_observable(final_name, n_dim);
    const auto [x, y] = test_vectors(vectors, n_dim, run.seed);

    std::vector<Point> points;
    for (double eta : etas)
      for (auto k64 : ks) {
        const auto k = static_cast<std::size_t>(k64);
        Point p{eta, k, {}, {}, {}};
        for (std::size_t j = 0; j < k; ++j) p.z.emplace_back(energy, alternate && j % 2 == 1 ? -eta : eta);
        const SpectralTuple t(p.z);
        std::vector<Matrix> all(k - 1, a);
        all.push_back(a_final);
        p.pred_av = m_averaged(t, all).value;
        if (isotropic)
          p.pred_iso = m_matrix_partition(t, std::span<const Matrix>(all.data(), k - 1)).isotropic(x, y);
        points.push_back(std::move(p));
      }

    const std::size_t per_point = isotropic ? 2 : 1;
    const auto start = Clock::now();
    const MonteCarloResult mc = monte_carlo(
        spec,
        [&](const WignerSample& s, std::size_t) {
          RotationCache cache(s);
          const auto rot_a = cache.get(a);
          const auto rot_final = cache.get(a_final);
          std::optional<Vector> rx, ry;
          if (isotropic) {
            rx = s.rotate(x);
            ry = s.rotate(y);
          }
          auto make = [&s](cplx z) { return spectral_values(s, [z](double l) { return 1.0 / (l - z); }); };
          SpectralMemo<cplx, decltype(make)> memo(make);
          std::vector<cplx> out;
          for (const auto& p : points) {
            std::vector<Eigen::VectorXcd> d;
            for (cplx z : p.z) d.push_back(memo.get(z));
            std::vector<std::shared_ptr<const Matrix>> lead(p.k - 1, rot_a), full = lead;
            full.push_back(rot_final);
            out.push_back(chain_value(RotatedChain(full), d, ChainMode::averaged));
            if (isotropic) out.push_back(chain_value(RotatedChain(lead, rx, ry), d, ChainMode::isotropic));
          }
          return out;
        },
        n_samples, plan, gi, run.workers);
    const double wall = run.timing ? elapsed_ms(start) : 0.0;

    for (std::size_t pi = 0; pi < points.size(); ++pi) {
      const auto& p = points[pi];
      json params = {{"eta", p.eta},
                     {"energy", energy},
                     {"z", json::array()},
                     {"observable", obs_name},
                     {"final_observable", final_name},
                     {"ensemble", ensemble_json(spec)}};
      for (cplx z : p.z) params["z"].push_back(pair_json(z));
      const auto k = static_cast<std::int64_t>(p.k);
      const std::size_t c_av = pi * per_point;
      const Statistic av = mc.stats[c_av];
      const Statistic av_abs = abs_deviation(mc, c_av, p.pred_av);
      records.push_back(make_record("locallaw.averaged", ns[gi], k, params, run.seed, static_cast<std::int64_t>(n_samples),
                                    p.pred_av, av.mean, av.std_error, wall));
      records.push_back(make_record("locallaw.averaged_abs", ns[gi], k, params, run.seed,
                                    static_cast<std::int64_t>(n_samples), 0.0, av_abs.mean, av_abs.std_error, wall));
      Summary sm{ns[gi], p.eta, p.k, av_abs.mean.real(), 0.0};
      if (isotropic) {
        json iso_params = params;
        iso_params["vectors"] = vectors;
        const Statistic iso = mc.stats[c_av + 1];
        const Statistic iso_abs = abs_deviation(mc, c_av + 1, p.pred_iso);
        records.push_back(make_record("locallaw.isotropic", ns[gi], k, iso_params, run.seed,
                                      static_cast<std::int64_t>(n_samples), p.pred_iso, iso.mean, iso.std_error, wall));
        records.push_back(make_record("locallaw.isotropic_abs", ns[gi], k, iso_params, run.seed,
                                      static_cast<std::int64_t>(n_samples), 0.0, iso_abs.mean, iso_abs.std_error, wall));
        sm.iso_abs = iso_abs.mean.real();
      }
      summaries.push_back(sm);
    }
  }

  // Slope fits of the mean absolute deviations.
  auto emit_fit = [&](const std::string& id, std::int64_t n, std::size_t k, const std::vector<double>& xs,
                      const std::vector<double>& ys, double expected, json params) {
    if (xs.size() < 2) return;
    for (double v : ys)
      if (!(v > 0.0)) return;
    const LinearFit f = fit_power_law(xs, ys);
    params["r_squared"] = f.r_squared;
    params["points"] = f.points;
    records.push_back(make_record(id, n, static_cast<std::int64_t>(k), std::move(params), run.seed,
                                  static_cast<std::int64_t>(total_samples), expected, f.slope, f.slope_std_error, 0.0));
  };
  for (double eta : etas)
    for (auto k64 : ks) {
      const auto k = static_cast<std::size_t>(k64);
      std::vector<double> xs, av, iso;
      for (const auto& s : summaries)
        if (s.eta == eta && s.k == k) {
          xs.push_back(static_cast<double>(s.n));
          av.push_back(s.av_abs);
          iso.push_back(s.iso_abs);
        }
      const json params = {{"eta", eta}, {"n_values", xs}};
      emit_fit("locallaw.fit_n.averaged", 0, k, xs, av, -1.0, params);
      if (isotropic) emit_fit("locallaw.fit_n.isotropic", 0, k, xs, iso, -0.5, params);
    }
  for (auto n : ns)
    for (auto k64 : ks) {
      const auto k = static_cast<std::size_t>(k64);
      std::vector<double> xs, av, iso;
      for (const auto& s : summaries)
        if (s.n == n && s.k == k) {
          xs.push_back(s.eta);
          av.push_back(s.av_abs);
          iso.push_back(s.iso_abs);
        }
      const json params = {{"eta_values", xs}};
      const double kd = static_cast<double>(k);
      emit_fit("locallaw.fit_eta.averaged", n, k, xs, av, -kd, params);
      if (isotropic) emit_fit("locallaw.fit_eta.isotropic", n, k, xs, iso, 0.5 - kd, params);
    }
  return records;
}

// ---------------------------------------------------------------------------

std::vector<ExperimentRecord> run_thermalise(const RunConfig& cfg) {
  const RunSettings run = run_settings(cfg);
  const auto n64 = cfg.get_int("thermalise.n");
  if (n64 < 2) throw ValidationError("thermalise.n must be at least 2");
  const auto n_dim = static_cast<Eigen::Index>(n64);
  const double t_min = cfg.get_double("thermalise.t_min"), t_max = cfg.get_double("thermalise.t_max");
  const double t_step = cfg.get_double("thermalise.t_step");
  if (!(t_step > 0.0) || !(t_max >= t_min) || t_min < 0.0)
    throw ValidationError("thermalise time grid needs 0 <= t_min <= t_max and t_step > 0");
  std::vector<double> times;
  const auto steps = static_cast<std::size_t>(std::floor((t_max - t_min) / t_step + 1e-9));
  for (std::size_t i = 0; i <= steps; ++i) times.push_back(t_min + static_cast<double>(i) * t_step);

  std::vector<std::pair<double, double>> pairs;
  for (const auto& item : cfg.get_strings("thermalise.pairs")) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ValidationError("thermalise.pairs entries look like t:s, got '" + item + "'");
    try {
      pairs.emplace_back(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
    } catch (const std::exception&) {
      throw ValidationError("thermalise.pairs entry '" + item + "' is not numeric");
    }
  }
  const std::size_t n_samples = positive_count(cfg.get_int("thermalise.samples"), "thermalise.samples");
  const bool isotropic = cfg.get_bool("thermalise.isotropic");
  const std::string a_name = cfg.get("thermalise.a"), b_name = cfg.get("thermalise.b"), c_name = cfg.get("thermalise.c");
  const std::string vectors = cfg.get("thermalise.vectors");
  const double resolution = cfg.get_double("thermalise.envelope_resolution");

  const EnsembleSpec spec = cfg.ensemble(static_cast<std::size_t>(n64));
  const Matrix a = resolve_observable(a_name, n_dim), b = resolve_observable(b_name, n_dim);
  const Matrix c = pairs.empty() ? Matrix() : resolve_observable(c_name, n_dim);
  const Matrix a0 = traceless_part(a), b0 = traceless_part(b);
  const Matrix c0 = pairs.empty() ? Matrix() : traceless_part(c);
  const auto [x, y] = test_vectors(vectors, n_dim, run.seed);

  const std::vector<Matrix> ab = {a, b};
  const std::vector<Matrix> a_only = {a};
  const std::vector<Matrix> abc = pairs.empty() ? std::vector<Matrix>{} : std::vector<Matrix>{a, b, c};
  const std::vector<Matrix> abc0 = pairs.empty() ? std::vector<Matrix>{} : std::vector<Matrix>{a0, b0, c0};
  auto three_times = [](double t, double s) { return std::vector<double>{t, s - t, -s}; };

  const std::size_t per_time = isotropic ? 2 : 1;
  const auto start = Clock::now();
  const MonteCarloResult mc = monte_carlo(
      spec,
      [&](const WignerSample& s, std::size_t) {
        RotationCache cache(s);
        const auto ra = cache.get(a), rb = cache.get(b);
        std::optional<Vector> rx, ry;
        if (isotropic) {
          rx = s.rotate(x);
          ry = s.rotate(y);
        }
        auto make = [&s](double time) { return exp_values(s, time); };
        SpectralMemo<double, decltype(make)> memo(make);
        std::vector<cplx> out;
        const RotatedChain pair_chain({ra, rb});
        for (double t : times) {
          const std::vector<Eigen::VectorXcd> d = {memo.get(t), memo.get(-t)};
          out.push_back(chain_value(pair_chain, d, ChainMode::averaged));
          if (isotropic) out.push_back(chain_value(RotatedChain({ra}, rx, ry), d, ChainMode::isotropic));
        }
        if (!pairs.empty()) {
          const RotatedChain full({ra, rb, cache.get(c)});
          const RotatedChain centered({cache.get(a0), cache.get(b0), cache.get(c0)});
          for (auto [t, sv] : pairs) {
            std::vector<Eigen::VectorXcd> d;
            for (double time : three_times(t, sv)) d.push_back(memo.get(time));
            out.push_back(chain_value(full, d, ChainMode::averaged));
            out.push_back(chain_value(centered, d, ChainMode::averaged));
          }
        }
        return out;
      },
      n_samples, SeedPlan{run.seed}, 0, run.workers);
  const double wall = run.timing ? elapsed_ms(start) : 0.0;

  std::vector<ExperimentRecord> records;
  const json base = {{"a", a_name}, {"b", b_name}, {"ensemble", ensemble_json(spec)}};
  const cplx plateau = normalized_trace(a) * normalized_trace(b);
  std::vector<double> env_t, env_abs, env_noise;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    const std::vector<double> s = {t, -t};
    json params = base;
    params["t"] = t;
    if (t > 0.0) params["large_time_form"] = pair_json(two_observable_asymptotic(t, a, b));
    const Statistic st = mc.stats[i * per_time];
    records.push_back(make_record("thermalise.averaged", n64, 2, params, run.seed, static_cast<std::int64_t>(n_samples),
                                  exp_prediction(s, ab).value, st.mean, st.std_error, wall));
    if (t > 0.0) {
      env_t.push_back(t);
      env_abs.push_back(std::abs(st.mean - plateau));
      env_noise.push_back(st.std_error);
    }
    if (isotropic) {
      json iso = params;
      iso["vectors"] = vectors;
      if (t > 0.0) iso["large_time_form"] = pair_json(two_observable_asymptotic_isotropic(t, a, x, y));
      const Statistic si = mc.stats[i * per_time + 1];
      records.push_back(make_record("thermalise.isotropic", n64, 2, iso, run.seed, static_cast<std::int64_t>(n_samples),
                                    exp_prediction_isotropic(s, a_only, x, y).value, si.mean, si.std_error, wall));
    }
  }
  const std::size_t three_base = times.size() * per_time;
  for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
    const auto [t, sv] = pairs[pi];
    const auto s = three_times(t, sv);
    json params = base;
    params["c"] = c_name;
    params["t"] = t;
    params["s"] = sv;
    json centered_params = params;
    if (sv > 0.0 && t > sv) {
      params["five_term"] = three_observable_asymptotic(t, sv, a, b, c).to_json();
      centered_params["five_term"] = three_observable_asymptotic(t, sv, a0, b0, c0).to_json();
    }
    const Statistic full = mc.stats[three_base + 2 * pi], centered = mc.stats[three_base + 2 * pi + 1];
    records.push_back(make_record("thermalise.three", n64, 3, params, run.seed, static_cast<std::int64_t>(n_samples),
                                  exp_prediction(s, abc).value, full.mean, full.std_error, wall));
    records.push_back(make_record("thermalise.three_centered", n64, 3, centered_params, run.seed,
                                  static_cast<std::int64_t>(n_samples), exp_prediction(s, abc0).value, centered.mean,
                                  centered.std_error, wall));
  }

  try {
    const EnvelopeFit env = fit_envelope(env_t, env_abs, env_noise, resolution);
    json params = base;
    params["t_maxima"] = env.t;
    params["abs_maxima"] = env.value;
    params["rejected"] = env.rejected;
    params["resolution"] = resolution;
    params["r_squared"] = env.fit.r_squared;
    records.push_back(make_record("thermalise.envelope_fit", n64, 2, params, run.seed,
                                  static_cast<std::int64_t>(n_samples), -3.0, env.fit.slope, env.fit.slope_std_error,
                                  0.0));
  } catch (const ValidationError& e) {
    // Too few resolved maxima: the fit is data, so its absence is recorded.
    json params = base;
    params["fit_error"] = e.what();
    ExperimentRecord r = make_record("thermalise.envelope_fit", n64, 2, params, run.seed,
                                     static_cast<std::int64_t>(n_samples), -3.0, std::nan(""), std::nan(""), 0.0);
    records.push_back(r);
  }
  return records;
}

// ---------------------------------------------------------------------------

std::vector<ExperimentRecord> run_freeness(const RunConfig& cfg) {
  const RunSettings run = run_settings(cfg);
  const auto n64 = cfg.get_int("freeness.n");
  if (n64 < 2) throw ValidationError("freeness.n must be at least 2");
  const auto n_dim = static_cast<Eigen::Index>(n64);
  const auto names = cfg.get_strings("freeness.observables");
  auto degrees = cfg.get_ints("freeness.degrees");
  const auto separations = cfg.get_doubles("freeness.separations");
  const double window = cfg.get_double("freeness.window");
  const auto window_points = cfg.get_int("freeness.window_points");
  const std::size_t n_samples = positive_count(cfg.get_int("freeness.samples"), "freeness.samples");
  if (names.empty()) throw ValidationError("freeness.observables must be nonempty");
  if (degrees.size() == 1) degrees.assign(names.size(), degrees[0]);
  if (degrees.size() != names.size())
    throw ValidationError("freeness.degrees must hold one degree or one per observable");
  if (separations.empty()) throw ValidationError("freeness.separations must be nonempty");
  if (window_points < 1 || !(window >= 0.0)) throw ValidationError("freeness window needs width >= 0 and >= 1 point");
  const std::size_t k = names.size();
  if (k > kPartitionRouteCap) throw SizeLimitError("freeness product length", k, kPartitionRouteCap);

  const EnsembleSpec spec = cfg.ensemble(static_cast<std::size_t>(n64));
  std::vector<Matrix> p;
  for (std::size_t i = 0; i < k; ++i) {
    Matrix power = matrix_power(resolve_observable(names[i], n_dim), degrees[i]);
    power.diagonal().array() -= normalized_trace(power);
    p.push_back(std::move(power));
  }

  struct Point {
    std::size_t separation_index;
    double separation;
    double offset;
    std::vector<double> times;  // t_1..t_k
    std::vector<double> s;      // exponents of the chain
  };
  std::vector<Point> points;
  for (std::size_t si = 0; si < separations.size(); ++si) {
    const double sep = separations[si];
    if (sep < 0.0) throw ValidationError("freeness.separations must be non-negative");
    std::vector<double> offsets = {0.0};
    if (sep > 0.0 && window_points > 1) {
      offsets.clear();
      for (std::int64_t j = 0; j < window_points; ++j)
        offsets.push_back(-window / 2 + window * static_cast<double>(j) / static_cast<double>(window_points - 1));
    }
    for (double off : offsets) {
      const double delta = sep + off;
      if (sep > 0.0 && !(delta > 0.0)) continue;
      Point pt{si, sep, off, {}, {}};
      for (std::size_t i = 1; i <= k; ++i) pt.times.push_back(static_cast<double>(k - i) * delta);
      pt.s.push_back(pt.times.front() - pt.times.back());
      for (std::size_t i = 1; i < k; ++i) pt.s.push_back(pt.times[i] - pt.times[i - 1]);
      points.push_back(std::move(pt));
    }
  }

  const auto start = Clock::now();
  const MonteCarloResult mc = monte_carlo(
      spec,
      [&](const WignerSample& s, std::size_t) {
        RotationCache cache(s);
        std::vector<std::shared_ptr<const Matrix>> rotated;
        for (const auto& m : p) rotated.push_back(cache.get(m));
        const RotatedChain chain(rotated);
        auto make = [&s](double time) { return exp_values(s, time); };
        SpectralMemo<double, decltype(make)> memo(make);
        std::vector<cplx> out;
        for (const auto& pt : points) {
          std::vector<Eigen::VectorXcd> d;
          for (double time : pt.s) d.push_back(memo.get(time));
          out.push_back(chain_value(chain, d, ChainMode::averaged));
        }
        return out;
      },
      n_samples, SeedPlan{run.seed}, 0, run.workers);
  const double wall = run.timing ? elapsed_ms(start) : 0.0;

  std::vector<ExperimentRecord> records;
  const json base = {{"observables", names}, {"degrees", degrees}, {"ensemble", ensemble_json(spec)}};
  std::vector<double> win_mean(separations.size(), 0.0), win_pred(separations.size(), 0.0),
      win_var(separations.size(), 0.0), win_tmax(separations.size(), 0.0);
  std::vector<std::size_t> win_count(separations.size(), 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& pt = points[i];
    const cplx pred = exp_prediction(pt.s, p).value;
    const Statistic st = mc.stats[i];
    json params = base;
    params["separation"] = pt.separation;
    params["offset"] = pt.offset;
    params["times"] = pt.times;
    records.push_back(make_record("freeness.point", n64, static_cast<std::int64_t>(k), params, run.seed,
                                  static_cast<std::int64_t>(n_samples), pred, st.mean, st.std_error, wall));
    const std::size_t si = pt.separation_index;
    win_mean[si] += std::abs(st.mean);
    win_pred[si] += std::abs(pred);
    win_var[si] += st.std_error * st.std_error;
    win_tmax[si] = std::max(win_tmax[si], pt.times.front());
    ++win_count[si];
  }
  const double kd = static_cast<double>(k);
  for (std::size_t si = 0; si < separations.size(); ++si) {
    if (win_count[si] == 0) continue;
    const double cnt = static_cast<double>(win_count[si]);
    const double sep = separations[si];
    json params = base;
    params["separation"] = sep;
    params["window"] = sep > 0.0 ? window : 0.0;
    params["window_points"] = win_count[si];
    params["degenerate"] = sep == 0.0;
    params["envelope"] = std::pow(1.0 + sep, -3.0) + std::pow(win_tmax[si], kd) / static_cast<double>(n64);
    params["max_time_ratio"] = win_tmax[si] / std::pow(static_cast<double>(n64), 1.0 / kd);
    records.push_back(make_record("freeness.window", n64, static_cast<std::int64_t>(k), params, run.seed,
                                  static_cast<std::int64_t>(n_samples), win_pred[si] / cnt, win_mean[si] / cnt,
                                  std::sqrt(win_var[si]) / cnt, wall));
  }
  return records;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<Matrix> chain_observables(const std::vector<std::string>& names, std::size_t k, Eigen::Index n) {
  if (names.empty()) throw ValidationError("at least one observable is required");
  if (names.size() != 1 && names.size() != k)
    throw ValidationError("expected 1 or " + std::to_string(k) + " observables, got " + std::to_string(names.size()));
  std::vector<Matrix> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(resolve_observable(names[names.size() == 1 ? 0 : i], n));
  return out;
}

json prediction_json(const std::string& kind, const ScalarPrediction& p) {
  json j = p.to_json();
  j["kind"] = kind;
  return j;
}

}  // namespace

json predict_chain(const std::vector<cplx>& z, const std::vector<std::string>& observables, Eigen::Index n) {
  if (z.empty()) throw ValidationError("predict chain needs at least one spectral parameter");
  const auto a = chain_observables(observables, z.size(), n);
  json j = prediction_json("chain", m_averaged(SpectralTuple(z), a));
  j["z"] = json::array();
  for (cplx zi : z) j["z"].push_back(pair_json(zi));
  return j;
}

json predict_exp(const std::vector<double>& s, const std::vector<std::string>& observables, Eigen::Index n) {
  if (s.empty()) throw ValidationError("predict exp needs at least one time");
  json j = prediction_json("exp", exp_prediction(s, chain_observables(observables, s.size(), n)));
  j["s"] = s;
  return j;
}

json predict_f(const std::vector<std::string>& functions, std::size_t k, const std::vector<std::string>& observables,
               Eigen::Index n) {
  if (functions.empty()) throw ValidationError("predict f needs at least one function");
  if (k == 0) k = functions.size();
  if (functions.size() != 1 && functions.size() != k)
    throw ValidationError("expected 1 or " + std::to_string(k) + " functions, got " + std::to_string(functions.size()));
  std::vector<ScalarFunction> f;
  for (std::size_t i = 0; i < k; ++i) {
    const auto expr = std::make_shared<Expression>(functions[functions.size() == 1 ? 0 : i]);
    f.emplace_back([expr](double x) { return (*expr)(x); });
  }
  json j = prediction_json("f", f_prediction(f, chain_observables(observables, k, n)));
  j["functions"] = functions;
  return j;
}

}  // namespace freelab
