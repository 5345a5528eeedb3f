#include "mefm/dgp.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>

#include "mefm/errors.hpp"

namespace mefm {
namespace {

// Stream tags for the independent parts of one dataset.
enum Stream : std::uint64_t {
  kRowLoadings = 1,
  kColLoadings = 2,
  kFactors = 3,
  kNoise = 4,
  kEffects = 5,
};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

class InnovationSource {
 public:
  InnovationSource(Innovation law, std::uint64_t seed) : law_(law), rng_(seed) {}

  double operator()() {
    if (law_ == Innovation::normal) return normal_(rng_);
    // t_3 has variance 3
    return student_(rng_) / std::sqrt(3.0);
  }

 private:
  Innovation law_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::student_t_distribution<double> student_{3.0};
};

Vector center(Vector v) {
  v.array() -= v.mean();
  return v;
}

void check_zeta(const std::vector<double>& zeta, int k, const char* label) {
  if (static_cast<int>(zeta.size()) != k) {
    throw UsageError(std::string("DGPConfig: ") + label + " must have one entry per factor");
  }
  for (double z : zeta) {
    if (!(z >= 0.0 && z <= 0.5)) {
      throw UsageError(std::string("DGPConfig: ") + label + " entries must lie in [0, 0.5]");
    }
  }
}

std::string join(const std::vector<double>& values) {
  std::ostringstream out;
  out << std::setprecision(17);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out << ',';
    out << values[i];
  }
  return out.str();
}

double parse_double(std::string_view s, std::string_view key) {
  double v = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw UsageError("config: bad numeric value for '" + std::string(key) + "': '" +
                     std::string(s) + "'");
  }
  return v;
}

template <typename Int>
Int parse_int(std::string_view s, std::string_view key) {
  Int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw UsageError("config: bad integer value for '" + std::string(key) + "': '" +
                     std::string(s) + "'");
  }
  return v;
}

std::vector<double> parse_list(std::string_view s, std::string_view key) {
  std::vector<double> out;
  if (s.empty()) return out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto end = comma == std::string_view::npos ? s.size() : comma;
    out.push_back(parse_double(s.substr(start, end - start), key));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

const char* innovation_name(Innovation i) {
  return i == Innovation::normal ? "normal" : "student_t3";
}

const char* law_name(EffectLaw law) {
  switch (law) {
    case EffectLaw::gaussian:
      return "gaussian";
    case EffectLaw::rademacher:
      return "rademacher";
    case EffectLaw::local_pattern:
      return "local_pattern";
  }
  return "gaussian";
}

DGPConfig base_setting_one() {
  DGPConfig c;
  c.t = 100;
  c.p = 40;
  c.q = 40;
  c.kr = 1;
  c.kc = 2;
  c.zeta_r = {0.0};
  c.zeta_c = {0.0, 0.0};
  return c;
}

DGPConfig rank_setting(char variant) {
  DGPConfig c;
  c.kr = 3;
  c.kc = 3;
  c.zeta_r = {0.0, 0.0, 0.0};
  c.zeta_c = {0.0, 0.0, 0.0};
  if (variant == 'b') {
    c.zeta_r = {0.2, 0.0, 0.0};
    c.zeta_c = {0.2, 0.2, 0.0};
  } else if (variant == 'c') {
    c.zeta_r = {0.2, 0.2, 0.2};
    c.zeta_c = {0.2, 0.2, 0.2};
  }
  set_dimensions(c, 20, 20, 1.0);
  return c;
}

DGPConfig test_setting() {
  DGPConfig c;
  c.t = 40;
  c.p = 40;
  c.q = 40;
  c.kr = 2;
  c.kc = 2;
  c.zeta_r = {0.0, 0.0};
  c.zeta_c = {0.0, 0.0};
  c.effect_law = EffectLaw::rademacher;
  return c;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

double ar_spectral_radius(const std::vector<double>& coeffs) {
  const auto m = static_cast<Eigen::Index>(coeffs.size());
  if (m == 0) return 0.0;
  Matrix companion = Matrix::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) companion(0, i) = coeffs[static_cast<std::size_t>(i)];
  for (Eigen::Index i = 1; i < m; ++i) companion(i, i - 1) = 1.0;
  Eigen::EigenSolver<Matrix> solver(companion, false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

double ar_stationary_variance(const std::vector<double>& coeffs) {
  if (ar_spectral_radius(coeffs) >= 1.0) {
    throw UsageError("AR coefficients are not stationary");
  }
  const auto m = static_cast<Eigen::Index>(coeffs.size());
  // gamma_k - sum_i phi_i gamma_{|k-i|} = [k == 0], k = 0..m
  Matrix a = Matrix::Identity(m + 1, m + 1);
  for (Eigen::Index k = 0; k <= m; ++k) {
    for (Eigen::Index i = 1; i <= m; ++i) {
      a(k, std::abs(k - i)) -= coeffs[static_cast<std::size_t>(i - 1)];
    }
  }
  Vector rhs = Vector::Zero(m + 1);
  rhs(0) = 1.0;
  const Vector gamma = a.fullPivLu().solve(rhs);
  if (!(gamma(0) > 0.0) || !std::isfinite(gamma(0))) {
    throw NumericError("AR stationary variance solve failed");
  }
  return gamma(0);
}

int ar_burn_in(std::size_t order) {
  return 200 + 10 * static_cast<int>(order);
}

Matrix gen_standardized_ar(const std::vector<double>& coeffs, Innovation innovation,
                           std::size_t t, Eigen::Index n_series, std::uint64_t seed) {
  const double scale = 1.0 / std::sqrt(ar_stationary_variance(coeffs));
  const std::size_t order = coeffs.size();
  const int burn = ar_burn_in(order);
  const std::size_t total = t + static_cast<std::size_t>(burn);
  InnovationSource draw(innovation, seed);

  Matrix out(static_cast<Eigen::Index>(t), n_series);
  std::vector<double> path(total);
  for (Eigen::Index s = 0; s < n_series; ++s) {
    for (std::size_t i = 0; i < total; ++i) {
      double x = draw();
      const std::size_t lags = std::min(order, i);
      for (std::size_t l = 1; l <= lags; ++l) x += coeffs[l - 1] * path[i - l];
      path[i] = x;
    }
    for (std::size_t i = 0; i < t; ++i) {
      out(static_cast<Eigen::Index>(i), s) = scale * path[i + static_cast<std::size_t>(burn)];
    }
  }
  return out;
}

Matrix gen_loadings(Eigen::Index n, int k, const std::vector<double>& zeta, std::uint64_t seed,
                    bool centered) {
  if (k < 1) throw UsageError("gen_loadings: k must be positive");
  if (static_cast<int>(zeta.size()) != k) {
    throw UsageError("gen_loadings: one zeta per column required");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix u(n, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) u(i, j) = normal(rng);
  }
  for (Eigen::Index j = 0; j < k; ++j) {
    u.col(j) *= std::pow(static_cast<double>(n), -zeta[static_cast<std::size_t>(j)]);
  }
  if (centered) u.rowwise() -= u.colwise().mean();
  return u;
}

NoiseDraw gen_noise(const DGPConfig& config, std::uint64_t seed) {
  const Eigen::Index p = config.p;
  const Eigen::Index q = config.q;
  std::mt19937_64 rng(derive_seed(seed, 0));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution zeroed(config.sparse_prob);

  NoiseDraw out;
  out.sigma_eps.resize(p, q);
  for (Eigen::Index j = 0; j < q; ++j) {
    for (Eigen::Index i = 0; i < p; ++i) {
      out.sigma_eps(i, j) = config.noise_scale * std::abs(normal(rng));
    }
  }
  auto sparse_gaussian = [&](Eigen::Index rows, int cols) {
    Matrix a(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
      for (Eigen::Index i = 0; i < rows; ++i) {
        const double v = normal(rng);
        a(i, j) = zeroed(rng) ? 0.0 : v;
      }
    }
    return a;
  };
  out.aer = sparse_gaussian(p, config.ker);
  out.aec = sparse_gaussian(q, config.kec);

  const bool has_factor = config.ker > 0 && config.kec > 0;
  const Matrix fe = has_factor ? gen_standardized_ar(config.ar_e, config.innovation, config.t,
                                                     config.ker * config.kec, derive_seed(seed, 1))
                               : Matrix();
  const Matrix eps =
      gen_standardized_ar(config.ar_eps, config.innovation, config.t, p * q, derive_seed(seed, 2));

  std::vector<Matrix> frames;
  frames.reserve(config.t);
  for (std::size_t t = 0; t < config.t; ++t) {
    const auto ti = static_cast<Eigen::Index>(t);
    // eps series are laid out column-major over (i, j)
    Matrix e = out.sigma_eps.cwiseProduct(
        Eigen::Map<const Matrix, 0, Eigen::InnerStride<>>(eps.data() + ti, p, q,
                                                          Eigen::InnerStride<>(eps.rows())));
    if (has_factor) {
      Matrix f(config.ker, config.kec);
      for (Eigen::Index c = 0; c < f.size(); ++c) f(c) = fe(ti, c);
      e.noalias() += out.aer * f * out.aec.transpose();
    }
    frames.push_back(std::move(e));
  }
  out.e = MatrixSeries(std::move(frames));
  return out;
}

MeanEffects gen_effects(const DGPConfig& config, std::uint64_t seed) {
  const Eigen::Index p = config.p;
  const Eigen::Index q = config.q;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  auto rademacher = [&]() { return coin(rng) ? 1.0 : -1.0; };

  MeanEffects e;
  e.mu.resize(config.t);
  e.alpha.resize(config.t);
  e.beta.resize(config.t);
  static const double kPattern[3][3] = {{1, 1, -2}, {1, 2, -3}, {2, -5, 3}};

  for (std::size_t t = 0; t < config.t; ++t) {
    Vector va(p);
    Vector vb(q);
    if (config.effect_law == EffectLaw::gaussian) {
      e.mu[t] = config.m_mu + config.s_mu * normal(rng);
      for (Eigen::Index i = 0; i < p; ++i) va(i) = config.m_alpha + config.s_alpha * normal(rng);
      for (Eigen::Index j = 0; j < q; ++j) vb(j) = config.m_beta + config.s_beta * normal(rng);
    } else {
      e.mu[t] = config.u_mu * rademacher();
      for (Eigen::Index i = 0; i < p; ++i) va(i) = config.u_alpha * rademacher();
      for (Eigen::Index j = 0; j < q; ++j) vb(j) = config.u_beta * rademacher();
      if (config.effect_law == EffectLaw::rademacher && config.u_local > 0) {
        for (Eigen::Index i = config.u_local; i < p; ++i) va(i) = 0.0;
      }
      if (config.effect_law == EffectLaw::local_pattern) {
        va.setZero();
        for (int i = 0; i < 3; ++i) va(i) = config.u_pattern * kPattern[t % 3][i];
      }
    }
    e.alpha[t] = center(std::move(va));
    e.beta[t] = center(std::move(vb));
  }
  return e;
}

Matrix GroundTruth::qr() const {
  return ar * ar.colwise().norm().cwiseInverse().asDiagonal();
}

Matrix GroundTruth::qc() const {
  return ac * ac.colwise().norm().cwiseInverse().asDiagonal();
}

std::vector<Matrix> GroundTruth::fz() const {
  const Vector zr = ar.colwise().norm().transpose();
  const Vector zc = ac.colwise().norm().transpose();
  std::vector<Matrix> out;
  out.reserve(f.size());
  for (const Matrix& ft : f) out.push_back(zr.asDiagonal() * ft * zc.asDiagonal());
  return out;
}

Dataset gen_dataset(const DGPConfig& config) {
  validate(config);
  const std::uint64_t seed = config.seed;
  Dataset d;
  GroundTruth& g = d.truth;
  g.ar = gen_loadings(config.p, config.kr, config.zeta_r, derive_seed(seed, kRowLoadings), true);
  g.ac = gen_loadings(config.q, config.kc, config.zeta_c, derive_seed(seed, kColLoadings), true);
  const Matrix factors = gen_standardized_ar(config.ar_f, config.innovation, config.t,
                                             config.kr * config.kc, derive_seed(seed, kFactors));
  NoiseDraw noise = gen_noise(config, derive_seed(seed, kNoise));
  g.effects = gen_effects(config, derive_seed(seed, kEffects));
  g.sigma_eps = std::move(noise.sigma_eps);
  g.aer = std::move(noise.aer);
  g.aec = std::move(noise.aec);
  g.noise = std::move(noise.e);

  std::vector<Matrix> common;
  std::vector<Matrix> frames;
  common.reserve(config.t);
  frames.reserve(config.t);
  g.f.reserve(config.t);
  for (std::size_t t = 0; t < config.t; ++t) {
    Matrix f(config.kr, config.kc);
    for (Eigen::Index c = 0; c < f.size(); ++c) f(c) = factors(static_cast<Eigen::Index>(t), c);
    Matrix c = g.ar * f * g.ac.transpose();
    frames.push_back(g.effects.additive_frame(t) + c + g.noise[t]);
    common.push_back(std::move(c));
    g.f.push_back(std::move(f));
  }
  g.common = MatrixSeries(std::move(common));
  d.y = MatrixSeries(std::move(frames));
  return d;
}

void validate(const DGPConfig& c) {
  if (c.t < 1) throw UsageError("DGPConfig: T must be positive");
  if (c.p < 2 || c.q < 2) throw UsageError("DGPConfig: p and q must be at least 2");
  if (c.kr < 1 || c.kr >= c.p || c.kc < 1 || c.kc >= c.q) {
    throw UsageError("DGPConfig: need 1 <= kr < p and 1 <= kc < q");
  }
  check_zeta(c.zeta_r, c.kr, "zeta_r");
  check_zeta(c.zeta_c, c.kc, "zeta_c");
  for (const auto* ar : {&c.ar_f, &c.ar_e, &c.ar_eps}) {
    if (ar_spectral_radius(*ar) >= 1.0) {
      throw UsageError("DGPConfig: AR coefficients (" + join(*ar) + ") are not stationary");
    }
  }
  if (c.ker < 0 || c.kec < 0) throw UsageError("DGPConfig: ker and kec must be non-negative");
  if (!(c.sparse_prob >= 0.0 && c.sparse_prob <= 1.0)) {
    throw UsageError("DGPConfig: sparse_prob must lie in [0, 1]");
  }
  if (!(c.noise_scale >= 0.0)) throw UsageError("DGPConfig: noise_scale must be non-negative");
  if (c.s_mu < 0.0 || c.s_alpha < 0.0 || c.s_beta < 0.0) {
    throw UsageError("DGPConfig: effect standard deviations must be non-negative");
  }
  if (c.u_local < 0) throw UsageError("DGPConfig: u_local must be non-negative");
  if (c.effect_law == EffectLaw::local_pattern && c.p < 3) {
    throw UsageError("DGPConfig: local_pattern effects need p >= 3");
  }
}

void set_dimensions(DGPConfig& config, Eigen::Index p, Eigen::Index q, double t_factor) {
  if (!(t_factor > 0.0)) throw UsageError("set_dimensions: T factor must be positive");
  config.p = p;
  config.q = q;
  const double t = std::round(t_factor * static_cast<double>(p * q));
  config.t = static_cast<std::size_t>(std::max(1.0, t));
}

DGPConfig preset(std::string_view name) {
  DGPConfig c;
  if (name == "Ia" || name == "IIa") {
    c = base_setting_one();
  } else if (name == "Ib" || name == "IIb") {
    c = base_setting_one();
    c.zeta_r = {0.2};
    c.zeta_c = {0.2, 0.0};
    c.m_alpha = -2.0;
  } else if (name == "Ic" || name == "IIc") {
    c = base_setting_one();
    c.innovation = Innovation::student_t3;
  } else if (name == "Id" || name == "IId" || name == "Ie" || name == "IIe") {
    c = base_setting_one();
    c.zeta_r = {0.2};
    c.zeta_c = {0.2, 0.0};
    c.m_alpha = -2.0;
    c.p = 80;
    c.q = 80;
    c.s_alpha = 2.0;
    if (name.back() == 'e') c.t = 200;
  } else if (name == "IIIa" || name == "IIIb" || name == "IIIc") {
    c = rank_setting(name.back());
  } else if (name == "IVa") {
    c = test_setting();
    c.u_alpha = 0.1;
  } else if (name == "IVb") {
    c = test_setting();
    c.u_alpha = 0.1;
    c.u_beta = 0.1;
  } else if (name == "IVc") {
    c = test_setting();
    c.u_alpha = 1.0;
    c.u_local = 2;
  } else if (name == "Ic-AR1") {
    c = base_setting_one();
    c.innovation = Innovation::student_t3;
    c.ar_f = c.ar_e = c.ar_eps = {-0.2};
    c.t = 60;
    c.p = 60;
    c.q = 300;
  } else if (name == "IVc-pattern") {
    c = test_setting();
    c.effect_law = EffectLaw::local_pattern;
    c.t = 60;
    c.p = 80;
    c.q = 80;
    c.u_pattern = 1.0;
  } else {
    throw UsageError("unknown setting '" + std::string(name) + "'");
  }
  // The II* settings replace every AR(5) filter with white noise.
  if (name.starts_with("II") && !name.starts_with("III")) {
    c.ar_f.clear();
    c.ar_e.clear();
    c.ar_eps.clear();
  }
  c.name = std::string(name);
  return c;
}

std::vector<std::string> preset_names() {
  return {"Ia",   "Ib",   "Ic",   "Id",  "Ie",  "IIa", "IIb",    "IIc",        "IId", "IIe",
          "IIIa", "IIIb", "IIIc", "IVa", "IVb", "IVc", "Ic-AR1", "IVc-pattern"};
}

std::string format_config(const DGPConfig& c) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "name=" << c.name << '\n'
      << "T=" << c.t << '\n'
      << "p=" << c.p << '\n'
      << "q=" << c.q << '\n'
      << "kr=" << c.kr << '\n'
      << "kc=" << c.kc << '\n'
      << "zeta_r=" << join(c.zeta_r) << '\n'
      << "zeta_c=" << join(c.zeta_c) << '\n'
      << "ar_f=" << join(c.ar_f) << '\n'
      << "ar_e=" << join(c.ar_e) << '\n'
      << "ar_eps=" << join(c.ar_eps) << '\n'
      << "innovation=" << innovation_name(c.innovation) << '\n'
      << "ker=" << c.ker << '\n'
      << "kec=" << c.kec << '\n'
      << "sparse_prob=" << c.sparse_prob << '\n'
      << "noise_scale=" << c.noise_scale << '\n'
      << "effect_law=" << law_name(c.effect_law) << '\n'
      << "m_mu=" << c.m_mu << '\n'
      << "s_mu=" << c.s_mu << '\n'
      << "m_alpha=" << c.m_alpha << '\n'
      << "s_alpha=" << c.s_alpha << '\n'
      << "m_beta=" << c.m_beta << '\n'
      << "s_beta=" << c.s_beta << '\n'
      << "u_mu=" << c.u_mu << '\n'
      << "u_alpha=" << c.u_alpha << '\n'
      << "u_beta=" << c.u_beta << '\n'
      << "u_local=" << c.u_local << '\n'
      << "u_pattern=" << c.u_pattern << '\n'
      << "seed=" << c.seed << '\n';
  return out.str();
}

DGPConfig parse_config(std::string_view text, DGPConfig base) {
  using Setter = std::function<void(DGPConfig&, std::string_view, std::string_view)>;
  auto real = [](double DGPConfig::*m) -> Setter {
    return [m](DGPConfig& c, std::string_view v, std::string_view k) { c.*m = parse_double(v, k); };
  };
  auto integer = [](int DGPConfig::*m) -> Setter {
    return [m](DGPConfig& c, std::string_view v, std::string_view k) {
      c.*m = parse_int<int>(v, k);
    };
  };
  auto list = [](std::vector<double> DGPConfig::*m) -> Setter {
    return [m](DGPConfig& c, std::string_view v, std::string_view k) { c.*m = parse_list(v, k); };
  };
  const std::map<std::string, Setter, std::less<>> setters{
      {"name", [](DGPConfig& c, std::string_view v, std::string_view) { c.name = v; }},
      {"T",
       [](DGPConfig& c, std::string_view v, std::string_view k) {
         c.t = parse_int<std::size_t>(v, k);
       }},
      {"p",
       [](DGPConfig& c, std::string_view v, std::string_view k) {
         c.p = parse_int<Eigen::Index>(v, k);
       }},
      {"q",
       [](DGPConfig& c, std::string_view v, std::string_view k) {
         c.q = parse_int<Eigen::Index>(v, k);
       }},
      {"kr", integer(&DGPConfig::kr)},
      {"kc", integer(&DGPConfig::kc)},
      {"zeta_r", list(&DGPConfig::zeta_r)},
      {"zeta_c", list(&DGPConfig::zeta_c)},
      {"ar_f", list(&DGPConfig::ar_f)},
      {"ar_e", list(&DGPConfig::ar_e)},
      {"ar_eps", list(&DGPConfig::ar_eps)},
      {"innovation",
       [](DGPConfig& c, std::string_view v, std::string_view) {
         if (v == "normal") {
           c.innovation = Innovation::normal;
         } else if (v == "student_t3") {
           c.innovation = Innovation::student_t3;
         } else {
           throw UsageError("config: innovation must be normal or student_t3");
         }
       }},
      {"ker", integer(&DGPConfig::ker)},
      {"kec", integer(&DGPConfig::kec)},
      {"sparse_prob", real(&DGPConfig::sparse_prob)},
      {"noise_scale", real(&DGPConfig::noise_scale)},
      {"effect_law",
       [](DGPConfig& c, std::string_view v, std::string_view) {
         if (v == "gaussian") {
           c.effect_law = EffectLaw::gaussian;
         } else if (v == "rademacher") {
           c.effect_law = EffectLaw::rademacher;
         } else if (v == "local_pattern") {
           c.effect_law = EffectLaw::local_pattern;
         } else {
           throw UsageError("config: effect_law must be gaussian, rademacher or local_pattern");
         }
       }},
      {"m_mu", real(&DGPConfig::m_mu)},
      {"s_mu", real(&DGPConfig::s_mu)},
      {"m_alpha", real(&DGPConfig::m_alpha)},
      {"s_alpha", real(&DGPConfig::s_alpha)},
      {"m_beta", real(&DGPConfig::m_beta)},
      {"s_beta", real(&DGPConfig::s_beta)},
      {"u_mu", real(&DGPConfig::u_mu)},
      {"u_alpha", real(&DGPConfig::u_alpha)},
      {"u_beta", real(&DGPConfig::u_beta)},
      {"u_local", integer(&DGPConfig::u_local)},
      {"u_pattern", real(&DGPConfig::u_pattern)},
      {"seed",
       [](DGPConfig& c, std::string_view v, std::string_view k) {
         c.seed = parse_int<std::uint64_t>(v, k);
       }},
  };

  DGPConfig c = std::move(base);
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim(text.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) {
      throw UsageError("config line " + std::to_string(line_no) + ": unknown key '" +
                       std::string(key) + "'");
    }
    it->second(c, value, key);
  }
  return c;
}

}  // namespace mefm
