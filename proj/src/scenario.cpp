#include "star_swipt/scenario.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

namespace star_swipt {

void ScenarioConfig::validate() const {
  auto require = [](bool ok, const char* msg) {
    if (!ok) throw ConfigError(msg);
  };
  require(n_tx >= 1, "n_tx must be >= 1");
  require(n_ris >= 1, "n_ris must be >= 1");
  require(n_ir >= 1, "n_ir must be >= 1");
  require(n_uer >= 1, "n_uer must be >= 1");
  require(nu >= 0.0, "nu must be >= 0");
  require(e_th >= 0.0, "e_th must be >= 0");
  require(r_c_min >= 0.0, "r_c_min must be >= 0");
  require(pl_los < pl_nlos, "pl_los must be strictly smaller than pl_nlos");
  require(ir_radius >= 0.0 && uer_radius >= 0.0, "user radii must be >= 0");
  require(rician_k >= 0.0, "rician_k must be >= 0");
  require(ris_pos.z() > 0.0, "ris_pos must be above ground (z > 0)");
  require(std::isfinite(pt_db) && std::isfinite(noise_db),
          "pt_db and noise_db must be finite");
}

double ScenarioConfig::pt_linear() const { return std::pow(10.0, pt_db / 10.0); }

bool apply_scenario_key(ScenarioConfig& cfg, const KeyValue& kv) {
  using Setter = std::function<void(ScenarioConfig&, const KeyValue&)>;
  static const std::map<std::string, Setter> setters = {
      {"n_tx", [](auto& c, auto& v) { c.n_tx = parse_int(v); }},
      {"n_ris", [](auto& c, auto& v) { c.n_ris = parse_int(v); }},
      {"n_ir", [](auto& c, auto& v) { c.n_ir = parse_int(v); }},
      {"n_uer", [](auto& c, auto& v) { c.n_uer = parse_int(v); }},
      {"pt_db", [](auto& c, auto& v) { c.pt_db = parse_double(v); }},
      {"noise_db", [](auto& c, auto& v) { c.noise_db = parse_double(v); }},
      {"e_th", [](auto& c, auto& v) { c.e_th = parse_double(v); }},
      {"r_c_min", [](auto& c, auto& v) { c.r_c_min = parse_double(v); }},
      {"nu", [](auto& c, auto& v) { c.nu = parse_double(v); }},
      {"bs_pos", [](auto& c, auto& v) { c.bs_pos = parse_vec3(v); }},
      {"ris_pos", [](auto& c, auto& v) { c.ris_pos = parse_vec3(v); }},
      {"ir_offset", [](auto& c, auto& v) { c.ir_offset = parse_double(v); }},
      {"ir_radius", [](auto& c, auto& v) { c.ir_radius = parse_double(v); }},
      {"uer_offset", [](auto& c, auto& v) { c.uer_offset = parse_double(v); }},
      {"uer_radius", [](auto& c, auto& v) { c.uer_radius = parse_double(v); }},
      {"pl_los", [](auto& c, auto& v) { c.pl_los = parse_double(v); }},
      {"pl_nlos", [](auto& c, auto& v) { c.pl_nlos = parse_double(v); }},
      {"lambda1", [](auto& c, auto& v) { c.lambda1 = parse_double(v); }},
      {"lambda2", [](auto& c, auto& v) { c.lambda2 = parse_double(v); }},
      {"rician_k", [](auto& c, auto& v) { c.rician_k = parse_double(v); }},
      {"seed", [](auto& c, auto& v) { c.seed = parse_u64(v); }},
  };
  auto it = setters.find(kv.key);
  if (it == setters.end()) return false;
  it->second(cfg, kv);
  return true;
}

ScenarioConfig load_scenario_config(const std::filesystem::path& path) {
  ScenarioConfig cfg;
  for (const auto& kv : read_key_values(path)) {
    if (!apply_scenario_key(cfg, kv)) {
      throw ConfigError(path.string() + ":" + std::to_string(kv.line) +
                        ": unknown key '" + kv.key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

void ChannelSet::validate() const {
  const int m = n_ris();
  for (const auto& g : g_t) {
    if (g.size() != m) throw DimensionError("g_t length differs from RIS size");
  }
  for (const auto& g : g_r_hat) {
    if (g.size() != m) throw DimensionError("g_r_hat length differs from RIS size");
  }
  auto finite = [](const auto& x) { return x.allFinite(); };
  bool ok = finite(H);
  for (const auto& g : g_t) ok = ok && finite(g);
  for (const auto& g : g_r_hat) ok = ok && finite(g);
  if (!ok) throw std::domain_error("channel set contains non-finite entries");
  if (!(nu >= 0.0)) throw std::domain_error("uncertainty radius must be >= 0");
}

double path_loss_exponent(double d, double height, double los, double nlos,
                          double lambda1, double lambda2) {
  if (!(height > 0.0)) throw std::domain_error("height must be positive");
  if (d < height) throw std::domain_error("distance shorter than height");
  const double phi = 180.0 / std::numbers::pi * std::asin(height / d);
  const double p_los = 1.0 / (1.0 + lambda1 * std::exp(-lambda2 * (phi - lambda1)));
  return (los - nlos) * p_los + nlos;
}

CVec draw_link(Rng& rng, int n, double d, double alpha, double rician_k,
               const CVec& los) {
  const double amp = std::sqrt(std::pow(d, -alpha));
  const double w_los = std::sqrt(rician_k / (rician_k + 1.0));
  const double w_nlos = std::sqrt(1.0 / (rician_k + 1.0));
  CVec g(n);
  for (int i = 0; i < n; ++i) {
    cplx v = w_nlos * rng.complex_normal();
    if (rician_k > 0.0) v += w_los * los[i];
    g[i] = amp * v;
  }
  return g;
}

namespace {

// Half-wavelength ULA steering vector along `axis` toward unit direction `u`.
CVec steering(int n, const Vec3& axis, const Vec3& u) {
  CVec a(n);
  const double s = axis.dot(u);
  for (int i = 0; i < n; ++i) a[i] = std::polar(1.0, std::numbers::pi * i * s);
  return a;
}

Vec3 place_on_disc(Rng& rng, const Vec3& ris, const Vec3& normal, double side,
                   double offset, double radius) {
  const Vec3 foot{ris.x(), ris.y(), 0.0};
  const Vec3 centre = foot + side * offset * normal;
  const double r = radius * std::sqrt(rng.uniform());
  const double phi = 2.0 * std::numbers::pi * rng.uniform();
  Vec3 p = centre + Vec3{r * std::cos(phi), r * std::sin(phi), 0.0};
  // keep the user strictly on its half-space
  double along = (p - foot).dot(normal);
  if (side * along <= 0.0) {
    p -= 2.0 * along * normal;
    along = -along;
    if (along == 0.0) p += side * 1e-3 * normal;
  }
  return p;
}

}  // namespace

ChannelSet synthesize_channels(const ScenarioConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const int m = cfg.n_ris;
  const int nt = cfg.n_tx;

  Vec3 normal = cfg.ris_pos - cfg.bs_pos;
  normal.z() = 0.0;
  if (normal.norm() < 1e-9) normal = Vec3::UnitX();
  normal.normalize();
  const Vec3 ris_axis{-normal.y(), normal.x(), 0.0};

  ChannelSet ch;
  ch.nu = cfg.nu;

  auto link = [&](const Vec3& from, const Vec3& to, int n, const Vec3& axis) {
    const Vec3 diff = to - from;
    const double d = diff.norm();
    const double h = std::abs(diff.z());
    const double alpha = path_loss_exponent(std::max(d, h), h, cfg.pl_los,
                                            cfg.pl_nlos, cfg.lambda1, cfg.lambda2);
    return draw_link(rng, n, d, alpha, cfg.rician_k, steering(n, axis, diff / d));
  };

  // BS -> RIS: column n is the RIS response to BS antenna n.
  {
    const Vec3 diff = cfg.ris_pos - cfg.bs_pos;
    const double d = diff.norm();
    const double h = std::abs(diff.z());
    const double alpha = path_loss_exponent(d, h, cfg.pl_los, cfg.pl_nlos,
                                            cfg.lambda1, cfg.lambda2);
    const CVec a_ris = steering(m, ris_axis, -diff / d);
    const CVec a_bs = steering(nt, Vec3::UnitX(), diff / d);
    const double scale = std::pow(10.0, -cfg.noise_db / 20.0);
    ch.H.resize(m, nt);
    for (int n = 0; n < nt; ++n) {
      const CVec los = a_ris * std::conj(a_bs[n]);
      ch.H.col(n) = scale * draw_link(rng, m, d, alpha, cfg.rician_k, los);
    }
  }

  for (int k = 0; k < cfg.n_ir; ++k) {
    const Vec3 p = place_on_disc(rng, cfg.ris_pos, normal, +1.0, cfg.ir_offset,
                                 cfg.ir_radius);
    ch.ir_pos.push_back(p);
    ch.g_t.push_back(link(cfg.ris_pos, p, m, ris_axis));
  }
  for (int j = 0; j < cfg.n_uer; ++j) {
    const Vec3 p = place_on_disc(rng, cfg.ris_pos, normal, -1.0, cfg.uer_offset,
                                 cfg.uer_radius);
    ch.uer_pos.push_back(p);
    ch.g_r_hat.push_back(link(cfg.ris_pos, p, m, ris_axis));
  }
  return ch;
}

CVec sample_uncertainty(const CVec& g_hat, double nu, Rng& rng) {
  const int n = static_cast<int>(g_hat.size());
  CVec dg = CVec::Zero(n);
  if (nu <= 0.0 || n == 0) return dg;
  double nrm2 = 0.0;
  do {
    for (int i = 0; i < n; ++i) dg[i] = rng.complex_normal();
    nrm2 = dg.squaredNorm();
  } while (nrm2 == 0.0);
  // radius law for a uniform draw in a real ball of dimension 2n
  const double radius = nu * std::pow(rng.uniform(), 1.0 / (2.0 * n));
  return dg * (radius / std::sqrt(nrm2));
}

CVec sample_uncertainty(const CVec& g_hat, double nu, std::uint64_t seed) {
  Rng rng(seed);
  return sample_uncertainty(g_hat, nu, rng);
}

}  // namespace star_swipt
