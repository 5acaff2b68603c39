#include "star_swipt/cone_ipm.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

namespace star_swipt::ipm {

int ConeDims::size() const {
  int m = nonneg;
  for (int q : soc) m += q;
  for (int n : psd) m += n * (n + 1) / 2;
  return m;
}

int ConeDims::degree() const {
  int d = nonneg + static_cast<int>(soc.size());
  for (int n : psd) d += n;
  return d;
}

std::string to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::near_optimal: return "near_optimal";
    case Status::primal_infeasible: return "infeasible";
    case Status::dual_infeasible: return "unbounded";
    case Status::max_iterations: return "max_iterations";
    case Status::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

int svec_index(int n, int i, int j) { return j * n - j * (j - 1) / 2 + (i - j); }

RVec svec(const RMat& X) {
  const int n = static_cast<int>(X.rows());
  RVec v(n * (n + 1) / 2);
  int k = 0;
  for (int j = 0; j < n; ++j) {
    v[k++] = X(j, j);
    for (int i = j + 1; i < n; ++i) v[k++] = std::numbers::sqrt2 * 0.5 * (X(i, j) + X(j, i));
  }
  return v;
}

RMat smat(const Eigen::Ref<const RVec>& v, int n) {
  RMat X(n, n);
  int k = 0;
  for (int j = 0; j < n; ++j) {
    X(j, j) = v[k++];
    for (int i = j + 1; i < n; ++i) {
      X(i, j) = X(j, i) = v[k++] / std::numbers::sqrt2;
    }
  }
  return X;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// iterations without a better merit before giving up
constexpr int kStallIterations = 8;

struct Layout {
  int nl = 0;
  std::vector<int> q_off, q_dim, s_off, s_ord;
  int m = 0;

  explicit Layout(const ConeDims& d) : nl(d.nonneg) {
    int o = nl;
    for (int q : d.soc) {
      q_off.push_back(o);
      q_dim.push_back(q);
      o += q;
    }
    for (int n : d.psd) {
      s_off.push_back(o);
      s_ord.push_back(n);
      o += n * (n + 1) / 2;
    }
    m = o;
  }
  int psd_len(std::size_t b) const { return s_ord[b] * (s_ord[b] + 1) / 2; }
};

RVec identity(const Layout& L) {
  RVec e = RVec::Zero(L.m);
  e.head(L.nl).setOnes();
  for (int o : L.q_off) e[o] = 1.0;
  for (std::size_t b = 0; b < L.s_off.size(); ++b) {
    for (int i = 0; i < L.s_ord[b]; ++i) e[L.s_off[b] + svec_index(L.s_ord[b], i, i)] = 1.0;
  }
  return e;
}

// x o y
RVec jprod(const Layout& L, const RVec& x, const RVec& y) {
  RVec r(L.m);
  r.head(L.nl) = x.head(L.nl).cwiseProduct(y.head(L.nl));
  for (std::size_t k = 0; k < L.q_off.size(); ++k) {
    const int o = L.q_off[k], d = L.q_dim[k];
    r[o] = x.segment(o, d).dot(y.segment(o, d));
    r.segment(o + 1, d - 1) = x[o] * y.segment(o + 1, d - 1) + y[o] * x.segment(o + 1, d - 1);
  }
  for (std::size_t b = 0; b < L.s_off.size(); ++b) {
    const int n = L.s_ord[b], o = L.s_off[b], len = L.psd_len(b);
    const RMat X = smat(x.segment(o, len), n);
    const RMat Y = smat(y.segment(o, len), n);
    const RMat Z = 0.5 * (X * Y + Y * X);
    r.segment(o, len) = svec(Z);
  }
  return r;
}

// Solves lam o x = u for x; PSD parts of lam are diagonal.
RVec jdiv(const Layout& L, const RVec& lam, const RVec& u) {
  RVec x(L.m);
  x.head(L.nl) = u.head(L.nl).cwiseQuotient(lam.head(L.nl));
  for (std::size_t k = 0; k < L.q_off.size(); ++k) {
    const int o = L.q_off[k], d = L.q_dim[k];
    const double l0 = lam[o];
    const auto l1 = lam.segment(o + 1, d - 1);
    const auto u1 = u.segment(o + 1, d - 1);
    const double den = l0 * l0 - l1.squaredNorm();
    const double x0 = (l0 * u[o] - l1.dot(u1)) / den;
    x[o] = x0;
    x.segment(o + 1, d - 1) = (u1 - x0 * l1) / l0;
  }
  for (std::size_t b = 0; b < L.s_off.size(); ++b) {
    const int n = L.s_ord[b], o = L.s_off[b];
    for (int j = 0; j < n; ++j) {
      const double lj = lam[o + svec_index(n, j, j)];
      for (int i = j; i < n; ++i) {
        const double li = lam[o + svec_index(n, i, i)];
        const int k = o + svec_index(n, i, j);
        x[k] = 2.0 * u[k] / (li + lj);
      }
    }
  }
  return x;
}

// Largest t with lam + t*dx in the cone (lam interior, PSD parts diagonal).
double max_step(const Layout& L, const RVec& lam, const RVec& dx) {
  double t = kInf;
  for (int i = 0; i < L.nl; ++i) {
    if (dx[i] < 0.0) t = std::min(t, -lam[i] / dx[i]);
  }
  for (std::size_t k = 0; k < L.q_off.size(); ++k) {
    const int o = L.q_off[k], d = L.q_dim[k];
    const auto l = lam.segment(o, d);
    const auto v = dx.segment(o, d);
    const double a = v[0] * v[0] - v.tail(d - 1).squaredNorm();
    const double bb = l[0] * v[0] - l.tail(d - 1).dot(v.tail(d - 1));
    const double c = l[0] * l[0] - l.tail(d - 1).squaredNorm();
    const double disc = bb * bb - a * c;
    if (a < 0.0 || (bb < 0.0 && disc >= 0.0)) {
      const double root = c / (-bb + std::sqrt(std::max(disc, 0.0)));
      if (root >= 0.0) t = std::min(t, root);
    }
  }
  for (std::size_t b = 0; b < L.s_off.size(); ++b) {
    const int n = L.s_ord[b], o = L.s_off[b];
    RMat D = smat(dx.segment(o, L.psd_len(b)), n);
    RVec isq(n);
    for (int i = 0; i < n; ++i) isq[i] = 1.0 / std::sqrt(lam[o + svec_index(n, i, i)]);
    D = isq.asDiagonal() * D * isq.asDiagonal();
    Eigen::SelfAdjointEigenSolver<RMat> es(D, Eigen::EigenvaluesOnly);
    const double emin = es.eigenvalues()[0];
    if (emin < 0.0) t = std::min(t, -1.0 / emin);
  }
  return t;
}

// Smallest shift t such that x + t*e lies on the cone boundary, as a
// violation measure: positive when x is outside the cone.
double max_violation(const Layout& L, const RVec& x) {
  double t = -kInf;
  for (int i = 0; i < L.nl; ++i) t = std::max(t, -x[i]);
  for (std::size_t k = 0; k < L.q_off.size(); ++k) {
    const int o = L.q_off[k], d = L.q_dim[k];
    t = std::max(t, x.segment(o + 1, d - 1).norm() - x[o]);
  }
  for (std::size_t b = 0; b < L.s_off.size(); ++b) {
    const RMat X = smat(x.segment(L.s_off[b], L.psd_len(b)), L.s_ord[b]);
    Eigen::SelfAdjointEigenSolver<RMat> es(X, Eigen::EigenvaluesOnly);
    t = std::max(t, -es.eigenvalues()[0]);
  }
  return t;
}

struct Scaling {
  RVec d;
  std::vector<double> beta;
  std::vector<RVec> v;
  std::vector<RMat> r, rinv;
  RVec lambda;
};

Scaling identity_scaling(const Layout& L) {
  Scaling w;
  w.d = RVec::Ones(L.nl);
  for (int q : L.q_dim) {
    w.beta.push_back(1.0);
    RVec v = RVec::Zero(q);
    v[0] = 1.0;
    w.v.push_back(v);
  }
  for (int n : L.s_ord) {
    w.r.push_back(RMat::Identity(n, n));
    w.rinv.push_back(RMat::Identity(n, n));
  }
  w.lambda = identity(L);
  return w;
}

bool compute_scaling(const Layout& L, const RVec& s, const RVec& z, Scaling& w) {
  w.lambda.resize(L.m);
  w.d.resize(L.nl);
  for (int i = 0; i < L.nl; ++i) {
    if (!(s[i] > 0.0 && z[i] > 0.0)) return false;
    w.d[i] = std::sqrt(s[i] / z[i]);
    w.lambda[i] = std::sqrt(s[i] * z[i]);
  }
  w.beta.clear();
  w.v.clear();
  for (std::size_t k = 0; k < L.q_off.size(); ++k) {
    const int o = L.q_off[k], d = L.q_dim[k];
    const auto sk = s.segment(o, d);
    const auto zk = z.segment(o, d);
    const double sn = sk.tail(d - 1).norm(), zn = zk.tail(d - 1).norm();
    const double s2 = (sk[0] - sn) * (sk[0] + sn);
    const double z2 = (zk[0] - zn) * (zk[0] + zn);
    if (!(sk[0] > 0.0 && zk[0] > 0.0 && s2 > 0.0 && z2 > 0.0)) return false;
    const double aa = std::sqrt(s2), bb = std::sqrt(z2);
    const double beta = std::sqrt(aa / bb);
    const double cc = std::sqrt((sk.dot(zk) / (aa * bb) + 1.0) / 2.0);
    RVec wbar = sk / aa;
    wbar[0] += zk[0] / bb;
    wbar.tail(d - 1) -= zk.tail(d - 1) / bb;
    wbar /= 2.0 * cc;
    RVec v = wbar;
    v[0] += 1.0;
    v /= std::sqrt(2.0 * (wbar[0] + 1.0));
    // lambda = W z = beta (2 v v'z - J z)
    RVec lam = 2.0 * v.dot(zk) * v;
    lam[0] -= zk[0];
    lam.tail(d - 1) += zk.tail(d - 1);
    w.lambda.segment(o, d) = beta * lam;
    w.beta.push_back(beta);
    w.v.push_back(std::move(v));
  }
  w.r.clear();
  w.rinv.clear();
  for (std::size_t b = 0; b < L.s_off.size(); ++b) {
    const int n = L.s_ord[b], o = L.s_off[b], len = L.psd_len(b);
    Eigen::LLT<RMat> ls(smat(s.segment(o, len), n));
    Eigen::LLT<RMat> lz(smat(z.segment(o, len), n));
    if (ls.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
    const RMat Ls = ls.matrixL();
    const RMat Lz = lz.matrixL();
    Eigen::JacobiSVD<RMat> svd(Lz.transpose() * Ls, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const RVec sig = svd.singularValues();
    if (!(sig.minCoeff() > 0.0) || !sig.allFinite()) return false;
    const RVec isq = sig.cwiseSqrt().cwiseInverse();
    w.r.push_back(Ls * svd.matrixV() * isq.asDiagonal());
    w.rinv.push_back(isq.asDiagonal() * svd.matrixU().transpose() * Lz.transpose());
    w.lambda.segment(o, len).setZero();
    for (int i = 0; i < n; ++i) w.lambda[o + svec_index(n, i, i)] = sig[i];
  }
  return w.lambda.allFinite();
}

enum class Op { W, WT, Winv, WinvT };

RVec apply(const Layout& L, const Scaling& w, Op op, const RVec& x) {
  RVec y(L.m);
  const bool inv = (op == Op::Winv || op == Op::WinvT);
  if (inv) {
    y.head(L.nl) = x.head(L.nl).cwiseQuotient(w.d);
  } else {
    y.head(L.nl) = x.head(L.nl).cwiseProduct(w.d);
  }
  for (std::size_t k = 0; k < L.q_off.size(); ++k) {
    const int o = L.q_off[k], d = L.q_dim[k];
    const auto xk = x.segment(o, d);
    const RVec& v = w.v[k];
    RVec out;
    if (!inv) {
      out = 2.0 * v.dot(xk) * v;
      out[0] -= xk[0];
      out.tail(d - 1) += xk.tail(d - 1);
      out *= w.beta[k];
    } else {
      RVec jv = -v;
      jv[0] = v[0];
      out = 2.0 * jv.dot(xk) * jv;
      out[0] -= xk[0];
      out.tail(d - 1) += xk.tail(d - 1);
      out /= w.beta[k];
    }
    y.segment(o, d) = out;
  }
  for (std::size_t b = 0; b < L.s_off.size(); ++b) {
    const int n = L.s_ord[b], o = L.s_off[b], len = L.psd_len(b);
    const RMat X = smat(x.segment(o, len), n);
    RMat Y;
    switch (op) {
      case Op::W: Y = w.r[b].transpose() * X * w.r[b]; break;
      case Op::WT: Y = w.r[b] * X * w.r[b].transpose(); break;
      case Op::Winv: Y = w.rinv[b].transpose() * X * w.rinv[b]; break;
      case Op::WinvT: Y = w.rinv[b] * X * w.rinv[b].transpose(); break;
    }
    y.segment(o, len) = svec(Y);
  }
  return y;
}

// Reduced KKT system
//   [ 0  A'  G'   ] [ux]   [bx]
//   [ A  0   0    ] [uy] = [by]
//   [ G  0  -W'W  ] [uz]   [bz]
class Kkt {
 public:
  Kkt(const Problem& p, const Layout& L) : p_(p), L_(L), n_(static_cast<int>(p.c.size())) {
    Gr_ = p.G;
    Ad_ = RMat(p.A);
    AtA_ = Ad_.transpose() * Ad_;
    if (L.nl > 0) Gl_ = Gr_.middleRows(0, L.nl);
    for (std::size_t k = 0; k < L.q_off.size(); ++k) {
      SocBlock blk;
      Eigen::SparseMatrix<double, Eigen::RowMajor> rows = Gr_.middleRows(L.q_off[k], L.q_dim[k]);
      std::vector<int> mark(n_, -1);
      for (int r = 0; r < rows.outerSize(); ++r) {
        for (decltype(rows)::InnerIterator it(rows, r); it; ++it) {
          if (mark[it.col()] < 0) {
            mark[it.col()] = static_cast<int>(blk.cols.size());
            blk.cols.push_back(static_cast<int>(it.col()));
          }
        }
      }
      blk.g = RMat::Zero(L.q_dim[k], static_cast<int>(blk.cols.size()));
      for (int r = 0; r < rows.outerSize(); ++r) {
        for (decltype(rows)::InnerIterator it(rows, r); it; ++it) {
          blk.g(r, mark[it.col()]) += it.value();
        }
      }
      soc_.push_back(std::move(blk));
    }
    for (std::size_t b = 0; b < L.s_off.size(); ++b) {
      const int n = L.s_ord[b], o = L.s_off[b], len = L.psd_len(b);
      std::vector<std::pair<int, int>> ij(len);
      for (int j = 0; j < n; ++j) {
        for (int i = j; i < n; ++i) ij[svec_index(n, i, j)] = {i, j};
      }
      PsdBlock blk;
      for (int col = 0; col < p.G.outerSize(); ++col) {
        PsdColumn pc;
        pc.col = col;
        for (SpMat::InnerIterator it(p.G, col); it; ++it) {
          const int r = static_cast<int>(it.row());
          if (r < o || r >= o + len) continue;
          auto [i, j] = ij[r - o];
          const double val = (i == j) ? it.value() : it.value() / std::numbers::sqrt2;
          pc.entries.push_back({i, j, val});
        }
        if (!pc.entries.empty()) blk.cols.push_back(std::move(pc));
      }
      psd_.push_back(std::move(blk));
    }
  }

  bool factor(const Scaling& w) {
    w_ = &w;
    RMat H = AtA_;
    if (L_.nl > 0) {
      RVec dinv2 = w.d.cwiseProduct(w.d).cwiseInverse();
      SpMat Gl = Gl_;
      SpMat GtDG = SpMat(Gl.transpose()) * dinv2.asDiagonal() * Gl;
      H += RMat(GtDG);
    }
    for (std::size_t k = 0; k < soc_.size(); ++k) {
      const int d = L_.q_dim[k];
      const RVec& v = w.v[k];
      RVec jv = -v;
      jv[0] = v[0];
      RMat winv = 2.0 * jv * jv.transpose();
      winv.diagonal().array() += 1.0;
      winv(0, 0) -= 2.0;
      winv /= w.beta[k];
      const RMat wg = winv * soc_[k].g;
      const RMat blk = wg.transpose() * wg;
      const auto& cols = soc_[k].cols;
      for (std::size_t a = 0; a < cols.size(); ++a) {
        for (std::size_t c = 0; c < cols.size(); ++c) H(cols[a], cols[c]) += blk(a, c);
      }
      (void)d;
    }
    for (std::size_t b = 0; b < psd_.size(); ++b) {
      const int n = L_.s_ord[b];
      const RMat S = w.rinv[b].transpose() * w.rinv[b];
      const auto& cols = psd_[b].cols;
      RMat M(n, n);
      for (std::size_t a = 0; a < cols.size(); ++a) {
        M.setZero();
        for (const auto& e : cols[a].entries) {
          if (e.i == e.j) {
            M.noalias() += e.val * S.col(e.i) * S.row(e.i);
          } else {
            M.noalias() += e.val * (S.col(e.i) * S.row(e.j) + S.col(e.j) * S.row(e.i));
          }
        }
        for (std::size_t c = a; c < cols.size(); ++c) {
          double acc = 0.0;
          for (const auto& e : cols[c].entries) {
            acc += (e.i == e.j) ? e.val * M(e.i, e.i) : e.val * (M(e.i, e.j) + M(e.j, e.i));
          }
          H(cols[a].col, cols[c].col) += acc;
          if (c != a) H(cols[c].col, cols[a].col) += acc;
        }
      }
    }
    const double scale = std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
    double delta = 1e-13 * scale;
    for (int attempt = 0; attempt < 6; ++attempt) {
      RMat Hr = H;
      Hr.diagonal().array() += delta;
      llt_.compute(Hr);
      if (llt_.info() == Eigen::Success) {
        if (Ad_.rows() > 0) {
          HinvAt_ = llt_.solve(Ad_.transpose());
          RMat S = Ad_ * HinvAt_;
          S.diagonal().array() += 1e-14 * std::max(1.0, S.diagonal().maxCoeff());
          schur_.compute(S);
          if (schur_.info() != Eigen::Success) return false;
        }
        return true;
      }
      delta *= 100.0;
    }
    return false;
  }

  void solve(const RVec& bx, const RVec& by, const RVec& bz, RVec& ux, RVec& uy, RVec& uz) const {
    solve_once(bx, by, bz, ux, uy, uz);
    for (int it = 0; it < 6; ++it) {
      const RVec ex = bx - (Ad_.transpose() * uy + p_.G.transpose() * uz);
      const RVec ey = by - Ad_ * ux;
      const RVec ez = bz - (p_.G * ux - apply(L_, *w_, Op::WT, apply(L_, *w_, Op::W, uz)));
      RVec cx, cy, cz;
      solve_once(ex, ey, ez, cx, cy, cz);
      ux += cx;
      uy += cy;
      uz += cz;
    }
  }

 private:
  struct SocBlock {
    std::vector<int> cols;
    RMat g;
  };
  struct Entry {
    int i, j;
    double val;
  };
  struct PsdColumn {
    int col;
    std::vector<Entry> entries;
  };
  struct PsdBlock {
    std::vector<PsdColumn> cols;
  };

  RVec winv2(const RVec& v) const {
    return apply(L_, *w_, Op::Winv, apply(L_, *w_, Op::WinvT, v));
  }

  void solve_once(const RVec& bx, const RVec& by, const RVec& bz, RVec& ux, RVec& uy, RVec& uz) const {
    RVec r1 = bx + p_.G.transpose() * winv2(bz);
    if (Ad_.rows() > 0) {
      r1 += Ad_.transpose() * by;
      const RVec hr = llt_.solve(r1);
      uy = schur_.solve(Ad_ * hr - by);
      ux = hr - HinvAt_ * uy;
    } else {
      uy = RVec::Zero(0);
      ux = llt_.solve(r1);
    }
    uz = winv2(p_.G * ux - bz);
  }

  const Problem& p_;
  const Layout& L_;
  int n_;
  Eigen::SparseMatrix<double, Eigen::RowMajor> Gr_;
  SpMat Gl_;
  RMat Ad_, AtA_, HinvAt_;
  std::vector<SocBlock> soc_;
  std::vector<PsdBlock> psd_;
  const Scaling* w_ = nullptr;
  Eigen::LLT<RMat> llt_;
  Eigen::LDLT<RMat> schur_;
};

}  // namespace

Result solve(const Problem& prob, const Options& opt) {
  const Layout L(prob.dims);
  const int n = static_cast<int>(prob.c.size());
  const int p = static_cast<int>(prob.b.size());
  Result res;
  if (prob.G.rows() != L.m || prob.G.cols() != n || prob.h.size() != L.m ||
      prob.A.rows() != p || (p > 0 && prob.A.cols() != n)) {
    throw DimensionError("conic problem dimensions are inconsistent");
  }
  SpMat A = prob.A;
  if (p == 0) A.resize(0, n);
  const Problem P{prob.c, prob.G, prob.h, A, prob.b, prob.dims};

  const RVec e = identity(L);
  const double deg = prob.dims.degree();
  Kkt kkt(P, L);

  auto finish = [&](Status st, const RVec& x, const RVec& y, const RVec& z, const RVec& s,
                    double scale_xs, double scale_yz) {
    res.status = st;
    res.x = x / scale_xs;
    res.s = s / scale_xs;
    res.y = y / scale_yz;
    res.z = z / scale_yz;
    return res;
  };

  // initial point
  Scaling w = identity_scaling(L);
  if (!kkt.factor(w)) {
    res.status = Status::numerical_failure;
    return res;
  }
  RVec x, y, z, s;
  kkt.solve(RVec::Zero(n), P.b, P.h, x, y, s);
  s = -s;
  {
    RVec dx, dy;
    kkt.solve(-P.c, RVec::Zero(p), RVec::Zero(L.m), dx, y, z);
  }
  {
    const double ts = max_violation(L, s);
    if (ts >= -1e-8 * std::max(1.0, s.norm())) s += (1.0 + ts) * e;
    const double tz = max_violation(L, z);
    if (tz >= -1e-8 * std::max(1.0, z.norm())) z += (1.0 + tz) * e;
  }
  double tau = 1.0, kappa = 1.0;

  const double resx0 = std::max(1.0, P.c.norm());
  const double resy0 = std::max(1.0, P.b.norm());
  const double resz0 = std::max(1.0, P.h.norm());

  // best iterate so far, returned when progress stalls
  struct Snapshot {
    RVec x, y, z, s;
    double tau = 1.0, merit = kInf, pcost = 0, dcost = 0, gap = 0, relgap = kInf, pres = 0, dres = 0;
    int iter = -1;
  } best;
  auto finish_best = [&](Status st) {
    res.iterations = best.iter;
    res.pcost = best.pcost;
    res.dcost = best.dcost;
    res.gap = best.gap;
    res.pres = best.pres;
    res.dres = best.dres;
    const double f = opt.inaccurate_factor;
    if (best.pres <= f * opt.feastol && best.dres <= f * opt.feastol &&
        (best.gap <= f * opt.abstol || best.relgap <= f * opt.reltol)) {
      st = Status::near_optimal;
    }
    return finish(st, best.x, best.y, best.z, best.s, best.tau, best.tau);
  };

  for (int iter = 0;; ++iter) {
    const RVec hrx = A.transpose() * y + P.G.transpose() * z;
    const RVec rx = hrx + P.c * tau;
    const RVec hry = A * x;
    const RVec ry = hry - P.b * tau;
    const RVec hrz = s + P.G * x;
    const RVec rz = hrz - P.h * tau;
    const double cx = P.c.dot(x), by = P.b.dot(y), hz = P.h.dot(z);
    const double rt = kappa + cx + by + hz;
    const double gap = s.dot(z);
    const double mu = (gap + kappa * tau) / (deg + 1.0);
    const double pcost = cx / tau;
    const double dcost = -(by + hz) / tau;
    double relgap = kInf;
    if (pcost < 0.0) relgap = gap / (tau * tau) / -pcost;
    if (dcost > 0.0) relgap = gap / (tau * tau) / dcost;
    const double pres = std::max(ry.norm() / tau / resy0, rz.norm() / tau / resz0);
    const double dres = rx.norm() / tau / resx0;
    const double pinfres = (hz + by < 0.0) ? hrx.norm() / resx0 / -(hz + by) : kInf;
    const double dinfres = (cx < 0.0) ? std::max(hry.norm() / resy0, hrz.norm() / resz0) / -cx : kInf;

    res.iterations = iter;
    res.pcost = pcost;
    res.dcost = dcost;
    res.gap = gap / (tau * tau);
    res.pres = pres;
    res.dres = dres;
    if (opt.verbose) {
      std::fprintf(stderr, "%3d % .8e % .8e %.2e %.2e %.2e %.2e %.2e\n", iter, pcost, dcost,
                   res.gap, pres, dres, tau, kappa);
    }
    if (!std::isfinite(pcost) || !std::isfinite(dcost) || !std::isfinite(gap)) {
      return best.iter >= 0 ? finish_best(Status::numerical_failure)
                             : finish(Status::numerical_failure, x, y, z, s, tau, tau);
    }
    if (pres <= opt.feastol && dres <= opt.feastol &&
        (res.gap <= opt.abstol || relgap <= opt.reltol)) {
      return finish(Status::optimal, x, y, z, s, tau, tau);
    }
    if (pinfres <= opt.feastol) {
      return finish(Status::primal_infeasible, x, y, z, s, 1.0, -(hz + by));
    }
    if (dinfres <= opt.feastol) {
      return finish(Status::dual_infeasible, x, y, z, s, -cx, 1.0);
    }
    const double merit = std::max({pres, dres, std::min(res.gap, relgap)});
    if (merit < best.merit) {
      best = {x, y, z, s, tau, merit, pcost, dcost, res.gap, relgap, pres, dres, iter};
    }
    if (iter >= opt.max_iter || iter - best.iter >= kStallIterations) {
      return finish_best(Status::max_iterations);
    }

    if (!compute_scaling(L, s, z, w) || !kkt.factor(w)) {
      return best.iter >= 0 ? finish_best(Status::numerical_failure)
                             : finish(Status::numerical_failure, x, y, z, s, tau, tau);
    }
    const RVec& lam = w.lambda;
    RVec x1, y1, z1;
    kkt.solve(-P.c, P.b, P.h, x1, y1, z1);
    const double den = P.c.dot(x1) + P.b.dot(y1) + P.h.dot(z1) - kappa / tau;

    const RVec lamsq = jprod(L, lam, lam);
    RVec dsa, dza;
    double dtau_a = 0.0, dkappa_a = 0.0;
    double sigma = 0.0;
    RVec dx, dy, dz, ds_s, dz_s;
    double dtau = 0.0, dkappa = 0.0, step = 0.0;
    for (int pass = 0; pass < 2; ++pass) {
      RVec rc;
      double rtk;
      double eta;
      if (pass == 0) {
        rc = -lamsq;
        rtk = -tau * kappa;
        eta = 1.0;
      } else {
        rc = -lamsq + sigma * mu * e - jprod(L, dsa, dza);
        rtk = -tau * kappa + sigma * mu - dtau_a * dkappa_a;
        eta = 1.0 - sigma;
      }
      const RVec lrc = jdiv(L, lam, rc);
      const RVec bz = -eta * rz - apply(L, w, Op::WT, lrc);
      RVec x2, y2, z2;
      kkt.solve(-eta * rx, -eta * ry, bz, x2, y2, z2);
      dtau = (-eta * rt - rtk / tau - (P.c.dot(x2) + P.b.dot(y2) + P.h.dot(z2))) / den;
      dx = x2 + dtau * x1;
      dy = y2 + dtau * y1;
      dz = z2 + dtau * z1;
      dkappa = (rtk - kappa * dtau) / tau;
      dz_s = apply(L, w, Op::W, dz);
      ds_s = lrc - dz_s;
      double t = std::min(max_step(L, lam, ds_s), max_step(L, lam, dz_s));
      if (dtau < 0.0) t = std::min(t, -tau / dtau);
      if (dkappa < 0.0) t = std::min(t, -kappa / dkappa);
      if (!std::isfinite(dtau) || !dx.allFinite() || !dz.allFinite()) {
        return best.iter >= 0 ? finish_best(Status::numerical_failure)
                             : finish(Status::numerical_failure, x, y, z, s, tau, tau);
      }
      if (pass == 0) {
        const double a = std::min(1.0, t);
        sigma = std::pow(1.0 - a, 3.0);
        dsa = ds_s;
        dza = dz_s;
        dtau_a = dtau;
        dkappa_a = dkappa;
      } else {
        step = std::min(1.0, 0.99 * t);
      }
    }
    x += step * dx;
    y += step * dy;
    z += step * dz;
    s += step * apply(L, w, Op::WT, ds_s);
    tau += step * dtau;
    kappa += step * dkappa;
  }
}

}  // namespace star_swipt::ipm
