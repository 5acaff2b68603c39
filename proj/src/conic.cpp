#include "star_swipt/conic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "star_swipt/cone_ipm.hpp"

namespace star_swipt {

LinExpr LinExpr::var(int index, double coef) {
  LinExpr e;
  e.terms.emplace_back(index, coef);
  return e;
}

LinExpr& LinExpr::operator+=(const LinExpr& o) {
  terms.insert(terms.end(), o.terms.begin(), o.terms.end());
  constant += o.constant;
  return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& o) {
  for (const auto& [i, c] : o.terms) terms.emplace_back(i, -c);
  constant -= o.constant;
  return *this;
}

LinExpr& LinExpr::operator*=(double a) {
  for (auto& t : terms) t.second *= a;
  constant *= a;
  return *this;
}

double LinExpr::eval(const RVec& x) const {
  double v = constant;
  for (const auto& [i, c] : terms) v += c * x[i];
  return v;
}

LinExpr& LinExpr::compact() {
  std::sort(terms.begin(), terms.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<int, double>> out;
  for (const auto& t : terms) {
    if (!out.empty() && out.back().first == t.first) {
      out.back().second += t.second;
    } else {
      out.push_back(t);
    }
  }
  std::erase_if(out, [](const auto& t) { return t.second == 0.0; });
  terms = std::move(out);
  return *this;
}

LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
LinExpr operator-(LinExpr a) { return a *= -1.0; }
LinExpr operator*(double a, LinExpr e) { return e *= a; }
LinExpr operator*(LinExpr e, double a) { return e *= a; }

CLin operator+(const CLin& a, const CLin& b) { return {a.re + b.re, a.im + b.im}; }
CLin operator-(const CLin& a, const CLin& b) { return {a.re - b.re, a.im - b.im}; }
CLin operator*(cplx a, const CLin& x) {
  return {a.real() * x.re - a.imag() * x.im, a.real() * x.im + a.imag() * x.re};
}
CLin conj(const CLin& x) { return {x.re, -x.im}; }

CLin dotu(const CVec& a, const std::vector<CLin>& x) {
  if (a.size() != static_cast<Eigen::Index>(x.size())) throw DimensionError("dotu: length mismatch");
  CLin out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const cplx ai = a[static_cast<Eigen::Index>(i)];
    if (ai == cplx{}) continue;
    out.re += ai.real() * x[i].re - ai.imag() * x[i].im;
    out.im += ai.real() * x[i].im + ai.imag() * x[i].re;
  }
  return out;
}

LinExpr re_inner(const CVec& a, const std::vector<CLin>& x) {
  if (a.size() != static_cast<Eigen::Index>(x.size())) {
    throw DimensionError("re_inner: length mismatch");
  }
  LinExpr out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const cplx ai = a[static_cast<Eigen::Index>(i)];
    out += ai.real() * x[i].re + ai.imag() * x[i].im;
  }
  return out;
}

std::vector<LinExpr> flatten(const std::vector<CLin>& x) {
  std::vector<LinExpr> out;
  out.reserve(2 * x.size());
  for (const auto& c : x) out.push_back(c.re);
  for (const auto& c : x) out.push_back(c.im);
  return out;
}

CLin ComplexVarVec::operator[](int i) const {
  return {LinExpr::var(offset + i), LinExpr::var(offset + n + i)};
}

std::vector<CLin> ComplexVarVec::exprs() const {
  std::vector<CLin> out;
  for (int i = 0; i < n; ++i) out.push_back((*this)[i]);
  return out;
}

namespace {
int pair_index(int n, int a, int b) { return a * n - a * (a + 1) / 2 + (b - a - 1); }
}  // namespace

int HermitianVar::diag_index(int a) const { return offset + a; }
int HermitianVar::re_index(int a, int b) const { return offset + n + pair_index(n, a, b); }
int HermitianVar::im_index(int a, int b) const {
  return offset + n + n * (n - 1) / 2 + pair_index(n, a, b);
}

CLin HermitianVar::entry(int a, int b) const {
  if (a == b) return {LinExpr::var(diag_index(a)), LinExpr{}};
  if (a < b) return {LinExpr::var(re_index(a, b)), LinExpr::var(im_index(a, b))};
  return {LinExpr::var(re_index(b, a)), LinExpr::var(im_index(b, a), -1.0)};
}

LinExpr HermitianVar::trace() const {
  LinExpr t;
  for (int a = 0; a < n; ++a) t += LinExpr::var(diag_index(a));
  return t;
}

LinExpr HermitianVar::re_trace_product(const CMat& C) const {
  if (C.rows() != n || C.cols() != n) throw DimensionError("re_trace_product: shape mismatch");
  LinExpr t;
  for (int a = 0; a < n; ++a) {
    if (C(a, a).real() != 0.0) t.terms.emplace_back(diag_index(a), C(a, a).real());
    for (int b = a + 1; b < n; ++b) {
      // Re(C_ab conj(V_ab) + C_ba V_ab)
      const double cre = C(a, b).real() + C(b, a).real();
      const double cim = C(a, b).imag() - C(b, a).imag();
      if (cre != 0.0) t.terms.emplace_back(re_index(a, b), cre);
      if (cim != 0.0) t.terms.emplace_back(im_index(a, b), cim);
    }
  }
  return t;
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::near_optimal: return "near_optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::max_iterations: return "max_iterations";
    case SolveStatus::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

CVec ConicSolution::value(const ComplexVarVec& v) const {
  CVec out(v.n);
  for (int i = 0; i < v.n; ++i) out[i] = {x[v.offset + i], x[v.offset + v.n + i]};
  return out;
}

CMat ConicSolution::value(const HermitianVar& v) const {
  CMat out(v.n, v.n);
  for (int a = 0; a < v.n; ++a) {
    for (int b = 0; b < v.n; ++b) out(a, b) = value(v.entry(a, b));
  }
  return out;
}

int ConicProgram::reserve(const std::string& name, int size, VarKind kind) {
  if (size < 0) throw DimensionError("negative variable size");
  const int off = num_vars_;
  vars_.push_back({name, off, size, kind});
  num_vars_ += size;
  return off;
}

int ConicProgram::add_var(const std::string& name) { return reserve(name, 1, VarKind::scalar); }

std::vector<int> ConicProgram::add_vars(const std::string& name, int n) {
  const int off = reserve(name, n, VarKind::vector);
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = off + i;
  return idx;
}

ComplexVarVec ConicProgram::add_complex(const std::string& name, int n) {
  return {name, reserve(name, 2 * n, VarKind::complex_vector), n};
}

HermitianVar ConicProgram::add_hermitian(const std::string& name, int n) {
  return {name, reserve(name, n * n, VarKind::hermitian), n};
}

void ConicProgram::check(const LinExpr& e) const {
  if (!std::isfinite(e.constant)) throw std::domain_error("non-finite constant in constraint");
  for (const auto& [i, c] : e.terms) {
    if (i < 0 || i >= num_vars_) throw std::out_of_range("constraint references unknown variable");
    if (!std::isfinite(c)) throw std::domain_error("non-finite coefficient in constraint");
  }
}

void ConicProgram::minimize(LinExpr objective) {
  check(objective);
  objective_ = std::move(objective.compact());
  maximize_ = false;
}

void ConicProgram::maximize(LinExpr objective) {
  check(objective);
  objective_ = std::move(objective.compact());
  maximize_ = true;
}

namespace {
void require_label(const std::string& label) {
  if (label.empty()) throw std::invalid_argument("constraint label must be nonempty");
}
}  // namespace

void ConicProgram::add_equal(const LinExpr& lhs, const LinExpr& rhs, const std::string& label) {
  require_label(label);
  LinExpr e = lhs - rhs;
  check(e);
  cons_.push_back({ConeKind::zero, {std::move(e.compact())}, 0, label});
}

void ConicProgram::add_nonneg(const LinExpr& e, const std::string& label) {
  require_label(label);
  check(e);
  LinExpr c = e;
  cons_.push_back({ConeKind::nonneg, {std::move(c.compact())}, 0, label});
}

void ConicProgram::add_geq(const LinExpr& lhs, const LinExpr& rhs, const std::string& label) {
  add_nonneg(lhs - rhs, label);
}

void ConicProgram::add_soc(const LinExpr& t, const std::vector<LinExpr>& xs,
                           const std::string& label) {
  require_label(label);
  Constraint c{ConeKind::soc, {}, 0, label};
  c.rows.reserve(xs.size() + 1);
  c.rows.push_back(t);
  c.rows.insert(c.rows.end(), xs.begin(), xs.end());
  for (auto& r : c.rows) {
    check(r);
    r.compact();
  }
  cons_.push_back(std::move(c));
}

void ConicProgram::add_rotated(const std::vector<LinExpr>& xs, const LinExpr& y, const LinExpr& z,
                               const std::string& label) {
  // ||x||^2 <= y z, y,z >= 0  <=>  ||(2x, y - z)|| <= y + z
  std::vector<LinExpr> rows;
  rows.reserve(xs.size() + 1);
  for (const auto& x : xs) rows.push_back(2.0 * x);
  rows.push_back(y - z);
  add_soc(y + z, rows, label);
}

void ConicProgram::add_quad_over_lin(const LinExpr& x, const LinExpr& d, const LinExpr& rho,
                                     const std::string& label) {
  add_rotated({x}, rho, d, label);
}

void ConicProgram::add_sq_norm_le(const std::vector<LinExpr>& xs, const LinExpr& rhs,
                                  const std::string& label) {
  add_rotated(xs, rhs, LinExpr(1.0), label);
}

void ConicProgram::add_psd(int order, const std::vector<LinExpr>& lower, const std::string& label) {
  require_label(label);
  if (order < 1 || static_cast<int>(lower.size()) != order * (order + 1) / 2) {
    throw DimensionError("add_psd: lower triangle has the wrong length");
  }
  Constraint c{ConeKind::psd, lower, order, label};
  for (auto& r : c.rows) {
    check(r);
    r.compact();
  }
  cons_.push_back(std::move(c));
}

void ConicProgram::add_hermitian_psd(const HermitianVar& v, const std::string& label) {
  const int n = v.n;
  const int m = 2 * n;
  std::vector<LinExpr> lower;
  lower.reserve(m * (m + 1) / 2);
  for (int j = 0; j < m; ++j) {
    for (int i = j; i < m; ++i) {
      if (i < n) {
        lower.push_back(v.entry(i, j).re);
      } else if (j < n) {
        lower.push_back(v.entry(i - n, j).im);
      } else {
        lower.push_back(v.entry(i - n, j - n).re);
      }
    }
  }
  add_psd(m, lower, label);
}

int ConicProgram::count_labeled(const std::string& prefix) const {
  return static_cast<int>(std::count_if(cons_.begin(), cons_.end(), [&](const Constraint& c) {
    return c.label.compare(0, prefix.size(), prefix) == 0;
  }));
}

ConicSolution ConicProgram::solve(double tol, bool verbose) const {
  using Trip = Eigen::Triplet<double>;
  ipm::Problem p;
  const int n = num_vars_;
  p.c = RVec::Zero(n);
  for (const auto& [i, c] : objective_.terms) p.c[i] += maximize_ ? -c : c;

  std::vector<Trip> gt, at;
  std::vector<double> h, b;
  int row = 0;
  auto push_row = [&](const LinExpr& e, double scale) {
    for (const auto& [i, c] : e.terms) gt.emplace_back(row, i, -scale * c);
    h.push_back(scale * e.constant);
    ++row;
  };
  // Each block is divided by its largest coefficient. A positive multiple of
  // a cone is the same cone, so only the conditioning changes.
  auto block_scale = [](const Constraint& c) {
    double m = 0.0;
    for (const auto& r : c.rows) {
      for (const auto& t : r.terms) m = std::max(m, std::abs(t.second));
    }
    return m > 0.0 ? 1.0 / m : 1.0;
  };
  for (const auto& c : cons_) {
    if (c.kind == ConeKind::zero) {
      const double sc = block_scale(c);
      for (const auto& [i, v] : c.rows[0].terms) at.emplace_back(static_cast<int>(b.size()), i, sc * v);
      b.push_back(-sc * c.rows[0].constant);
    }
  }
  for (const auto& c : cons_) {
    if (c.kind != ConeKind::nonneg) continue;
    push_row(c.rows[0], block_scale(c));
    ++p.dims.nonneg;
  }
  for (const auto& c : cons_) {
    if (c.kind != ConeKind::soc) continue;
    const double sc = block_scale(c);
    for (const auto& r : c.rows) push_row(r, sc);
    p.dims.soc.push_back(static_cast<int>(c.rows.size()));
  }
  for (const auto& c : cons_) {
    if (c.kind != ConeKind::psd) continue;
    int k = 0;
    for (int j = 0; j < c.order; ++j) {
      for (int i = j; i < c.order; ++i) push_row(c.rows[k++], i == j ? 1.0 : std::numbers::sqrt2);
    }
    p.dims.psd.push_back(c.order);
  }
  p.G.resize(row, n);
  p.G.setFromTriplets(gt.begin(), gt.end());
  p.h = Eigen::Map<const RVec>(h.data(), static_cast<Eigen::Index>(h.size()));
  p.A.resize(static_cast<Eigen::Index>(b.size()), n);
  p.A.setFromTriplets(at.begin(), at.end());
  p.b = Eigen::Map<const RVec>(b.data(), static_cast<Eigen::Index>(b.size()));

  ipm::Options opt;
  opt.feastol = opt.abstol = opt.reltol = tol;
  opt.verbose = verbose;
  const ipm::Result r = ipm::solve(p, opt);

  ConicSolution sol;
  switch (r.status) {
    case ipm::Status::optimal: sol.status = SolveStatus::optimal; break;
    case ipm::Status::near_optimal: sol.status = SolveStatus::near_optimal; break;
    case ipm::Status::primal_infeasible: sol.status = SolveStatus::infeasible; break;
    case ipm::Status::dual_infeasible: sol.status = SolveStatus::unbounded; break;
    case ipm::Status::max_iterations: sol.status = SolveStatus::max_iterations; break;
    case ipm::Status::numerical_failure: sol.status = SolveStatus::numerical_failure; break;
  }
  sol.x = r.x.size() == n ? r.x : RVec::Zero(n);
  sol.iterations = r.iterations;
  sol.primal_residual = r.pres;
  sol.dual_residual = r.dres;
  sol.gap = r.gap;
  sol.objective = objective_.eval(sol.x);
  return sol;
}

namespace {
void print_expr(std::ostream& os, const LinExpr& e, const std::vector<VarInfo>& vars) {
  auto name_of = [&](int idx) {
    for (const auto& v : vars) {
      if (idx >= v.offset && idx < v.offset + v.size) {
        return v.size == 1 ? v.name : v.name + "[" + std::to_string(idx - v.offset) + "]";
      }
    }
    return std::string("?");
  };
  bool first = true;
  for (const auto& [i, c] : e.terms) {
    os << (first ? "" : " ") << (c < 0 ? "- " : (first ? "" : "+ ")) << std::abs(c) << "*"
       << name_of(i);
    first = false;
  }
  if (e.constant != 0.0 || first) {
    os << (first ? "" : " ") << (e.constant < 0 ? "- " : (first ? "" : "+ "))
       << std::abs(e.constant);
  }
}
}  // namespace

void ConicProgram::dump(std::ostream& os) const {
  os << "variables " << num_vars_ << "\n";
  for (const auto& v : vars_) os << "var " << v.name << " offset " << v.offset << " size " << v.size << "\n";
  os << (maximize_ ? "maximize " : "minimize ");
  print_expr(os, objective_, vars_);
  os << "\n";
  for (const auto& c : cons_) {
    os << c.label << ": ";
    switch (c.kind) {
      case ConeKind::zero:
        print_expr(os, c.rows[0], vars_);
        os << " == 0";
        break;
      case ConeKind::nonneg:
        print_expr(os, c.rows[0], vars_);
        os << " >= 0";
        break;
      case ConeKind::soc:
        os << "soc(";
        for (std::size_t i = 0; i < c.rows.size(); ++i) {
          if (i) os << "; ";
          print_expr(os, c.rows[i], vars_);
        }
        os << ")";
        break;
      case ConeKind::psd:
        os << "psd" << c.order << "(";
        for (std::size_t i = 0; i < c.rows.size(); ++i) {
          if (i) os << "; ";
          print_expr(os, c.rows[i], vars_);
        }
        os << ")";
        break;
    }
    os << "\n";
  }
}

RVec embed_complex(const CVec& v) {
  RVec out(2 * v.size());
  out << v.real(), v.imag();
  return out;
}

CVec unembed_complex(const RVec& v) {
  if (v.size() % 2 != 0) throw DimensionError("unembed_complex: odd length");
  const auto n = v.size() / 2;
  CVec out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = {v[i], v[n + i]};
  return out;
}

RMat embed_hermitian(const CMat& V) {
  const auto n = V.rows();
  RMat M(2 * n, 2 * n);
  M << V.real(), -V.imag(), V.imag(), V.real();
  return M;
}

CMat unembed_hermitian(const RMat& M) {
  if (M.rows() != M.cols() || M.rows() % 2 != 0) throw DimensionError("unembed_hermitian: bad shape");
  const auto n = M.rows() / 2;
  CMat V(n, n);
  V.real() = M.topLeftCorner(n, n);
  V.imag() = M.bottomLeftCorner(n, n);
  return V;
}

}  // namespace star_swipt
