#include "hpk/infmeasures.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>

#include "hpk/error.hpp"
#include "hpk/kernels.hpp"
#include "hpk/quadrature.hpp"

namespace hpk {

namespace {
constexpr double kPi = std::numbers::pi;

double sgn_pow(double x, int m) { return (x < 0.0 && (m % 2 == 1)) ? -1.0 : 1.0; }

// Adds GL nodes in theta on [a, b] mapped to x = tan(theta/2)/N, both signs.
void add_theta_panels(int N, double a, double b, int panels, int order, std::vector<double>& x,
                      std::vector<double>& w) {
  std::vector<double> th, wt;
  quad::append_gl_panels(a, b, panels, order, th, wt);
  for (std::size_t i = 0; i < th.size(); ++i) {
    const double phi = kPi - th[i];
    // tan(theta/2) = 1/tan(phi/2) keeps full relative accuracy near theta = pi.
    const double t = (th[i] < 0.5 * kPi) ? std::tan(0.5 * th[i]) : 1.0 / std::tan(0.5 * phi);
    const double c = std::cos(0.5 * th[i]);
    const double jac = (th[i] < 0.5 * kPi) ? 1.0 / (2.0 * N * c * c)
                                           : 1.0 / (2.0 * N * std::pow(std::sin(0.5 * phi), 2));
    x.push_back(t / N);
    w.push_back(wt[i] * jac);
  }
}

// Panels given in phi = pi - theta, for refinement toward theta = pi below the
// resolution of theta itself.
void add_phi_panels(int N, double phi_lo, double phi_hi, int order, std::vector<double>& x,
                    std::vector<double>& w) {
  std::vector<double> ph, wt;
  quad::append_gl_panels(phi_lo, phi_hi, 1, order, ph, wt);
  for (std::size_t i = 0; i < ph.size(); ++i) {
    x.push_back(1.0 / (std::tan(0.5 * ph[i]) * N));
    w.push_back(wt[i] / (2.0 * N * std::pow(std::sin(0.5 * ph[i]), 2)));
  }
}

void mirror(std::vector<double>& x, std::vector<double>& w) {
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    x.push_back(-x[i]);
    w.push_back(w[i]);
  }
}

// int_0^inf f(x) dx for f ~ c x^{-2-2s} at infinity (s > -1/2): [0, 1] through t = 1/x
// panels, [1, inf) through t = 1/x with a closed-form head near t = 0.
double half_line_integral(const std::function<double(double)>& f, double s, double t_max) {
  auto inner = [&](double t) { return f(1.0 / t) / (t * t); };  // x in (0, 1]
  const int panels = static_cast<int>(std::ceil(t_max - 1.0));
  double total = quad::gl_panels(inner, 1.0, t_max, panels, 16);
  const double t0 = 1e-6;
  const double c = inner(t0) / std::pow(t0, 2.0 * s);
  total += c * std::pow(t0, 2.0 * s + 1.0) / (2.0 * s + 1.0);
  total += quad::adaptive(inner, t0, 1.0, 1e-11);
  return total;
}
}  // namespace

// ------------------------------------------------------------- v-basis

VBasis::VBasis(const HPParam& param) : param_(param), v_(param.s_prime) {}

double VBasis::eval(int k, double x) const {
  if (k < 1 || k > param_.n_s) throw DomainError("eval_v_basis: k must lie in [1, n_s]");
  if (x == 0.0) throw DomainError("eval_v_basis: x = 0");
  return std::pow(x, k) * v_.eval(x);
}

double eval_v_basis(const VBasis& vb, int k, double x) { return vb.eval(k, x); }

bool exponent_square_integrable(double exponent) { return exponent < -0.5; }

GrowthCertificate growth_certificate(const VBasis& vb, int k, double T_lo, double T_hi, int points) {
  if (k < 1 || k > vb.size()) throw DomainError("growth_certificate: k must lie in [1, n_s]");
  if (!(T_lo > 1.0 && T_hi > T_lo) || points < 2) throw DomainError("growth_certificate: bad fit window");
  GrowthCertificate g;
  g.exponent = k - 1 - vb.param().s_prime;
  g.square_integrable = exponent_square_integrable(g.exponent);
  g.expected_slope = 2.0 * g.exponent + 1.0;
  // int v^2 dx = int v(e^u)^2 e^u du.
  auto f = [&](double u) {
    const double x = std::exp(u);
    const double v = vb.eval(k, x);
    return v * v * x;
  };
  auto piece = [&](double a, double b) {
    const int panels = std::max(2, static_cast<int>(std::ceil(4.0 * (b - a))));
    return quad::gl_panels(f, a, b, panels, 16);
  };
  double acc = piece(0.0, std::log(T_lo));
  double u_prev = std::log(T_lo);
  for (int i = 0; i < points; ++i) {
    const double u = std::log(T_lo) + (std::log(T_hi) - std::log(T_lo)) * i / (points - 1);
    if (i > 0) acc += piece(u_prev, u);
    u_prev = u;
    g.T.push_back(std::exp(u));
    g.integral.push_back(acc);
  }
  // Least-squares slope of log I against log T.
  double mx = 0, my = 0;
  for (int i = 0; i < points; ++i) {
    mx += std::log(g.T[i]);
    my += std::log(g.integral[i]);
  }
  mx /= points;
  my /= points;
  double sxy = 0, sxx = 0;
  for (int i = 0; i < points; ++i) {
    const double dx = std::log(g.T[i]) - mx;
    sxy += dx * (std::log(g.integral[i]) - my);
    sxx += dx * dx;
  }
  g.fitted_slope = sxy / sxx;
  return g;
}

// ---------------------------------------------------------- contraction

LineGrid proxy_line_grid(int N, int order, int levels) {
  if (N < 1) throw DomainError("proxy_line_grid: N must be >= 1");
  LineGrid g;
  const double h = kPi / N;
  if (N > 1) add_theta_panels(N, 0.0, kPi - h, N - 1, order, g.x, g.w);
  double width = h;
  for (int j = 0; j < levels; ++j) {
    add_phi_panels(N, 0.5 * width, width, order, g.x, g.w);
    width *= 0.5;
  }
  mirror(g.x, g.w);
  return g;
}

ContractionReport contraction_report(double s_prime, double sigma, const ContractionSpec& spec) {
  if (!(s_prime > -0.5)) throw DomainError("contraction_norm: s' must exceed -1/2");
  if (!(sigma > 0.0)) throw DomainError("contraction_norm: sigma must be positive");
  const int N = spec.N_proxy;
  const FiniteKernel k(HPParam::make(s_prime), N);
  const LineGrid grid = proxy_line_grid(N, spec.order);
  const int Q = static_cast<int>(grid.x.size());
  Eigen::MatrixXd A(Q, N);
  std::vector<double> row(N);
  for (int i = 0; i < Q; ++i) {
    k.eigenfunctions(grid.x[i], row.data());
    const double sc = std::sqrt(grid.w[i] * -std::expm1(-sigma * grid.x[i] * grid.x[i]));
    for (int j = 0; j < N; ++j) A(i, j) = sc * row[j];
  }
  // The nonzero spectrum of sqrt(1-g) Pi sqrt(1-g) is that of Psi^T (1-g) Psi.
  const Eigen::MatrixXd M = A.transpose() * A;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw EigenFailure("contraction_norm: eigensolver failed");
  ContractionReport rep;
  rep.N_proxy = N;
  for (int i = N - 1; i >= 0; --i) rep.spectrum.push_back(es.eigenvalues()(i));
  rep.norm = rep.spectrum.front();
  rep.trace = M.trace();
  rep.warning = rep.norm > 1.0 - 1e-3;

  // Independent rule for the trace: tanh-sinh pieces in theta.
  // Below phi0 the density is c phi^{2s'} to relative O(phi^2); that piece is added in closed form.
  constexpr double phi0 = 1e-9;
  auto dens = [&](double theta) {
    const double phi = kPi - theta;
    const double t = 1.0 / std::tan(0.5 * phi);
    const double x = t / N;
    const double jac = 1.0 / (2.0 * N * std::pow(std::sin(0.5 * phi), 2));
    return -std::expm1(-sigma * x * x) * k.diagonal(x) * jac;
  };
  const int pieces = std::max(8, N / 4);
  double tq = 0.0;
  for (int p = 0; p < pieces; ++p) {
    const double a = kPi * p / pieces, b = kPi * (p + 1) / pieces;
    tq += (p + 1 < pieces) ? quad::adaptive(dens, a, b, 1e-12) : quad::tanh_sinh(dens, a, b - phi0, 1e-12);
  }
  tq += dens(kPi - phi0) * phi0 / (1.0 + 2.0 * s_prime);
  rep.trace_quadrature = 2.0 * tq;

  const LimitKernel lim(s_prime);
  rep.limit_trace = 2.0 * half_line_integral(
                              [&](double x) { return -std::expm1(-sigma * x * x) * lim.diagonal(x); },
                              s_prime, 2000.0);
  return rep;
}

double contraction_norm(double s_prime, double sigma, const ContractionSpec& spec) {
  return contraction_report(s_prime, sigma, spec).norm;
}

// ----------------------------------------------------- damped projection

namespace {
struct DampedInputs {
  std::vector<double> x, w;
  double R = 0.0;
  Eigen::MatrixXd L;   // Q x m, sqrt(w) sgn^m psi_k (undamped)
  Eigen::MatrixXd V;   // Q x n_s, sqrt(w) v_k (undamped)
  Eigen::VectorXd sg;  // sqrt(g)
};

DampedInputs damped_inputs(const HPParam& param, double sigma, int m, const DampedGridSpec& spec) {
  if (!(sigma > 0.0)) throw DomainError("damped_projection: sigma must be positive");
  if (m < 1) throw DomainError("damped_projection: m must be >= 1");
  if (spec.order < 2 || spec.theta_panels_per_rank < 1 || !(spec.x_panel > 0.0))
    throw DomainError("damped_projection: bad grid spec");
  DampedInputs in;
  in.R = spec.R > 0.0 ? spec.R : std::sqrt(40.0 / sigma);
  const double x_split = std::min(1.0, in.R);
  add_theta_panels(m, 0.0, 2.0 * std::atan(m * x_split), spec.theta_panels_per_rank * m, spec.order, in.x,
                   in.w);
  if (in.R > x_split) {
    const int panels = static_cast<int>(std::ceil((in.R - x_split) / spec.x_panel));
    quad::append_gl_panels(x_split, in.R, panels, spec.order, in.x, in.w);
  }
  mirror(in.x, in.w);

  const FiniteKernel k(HPParam::make(param.s_prime), m);
  const VBasis vb(param);
  const int Q = static_cast<int>(in.x.size());
  in.L.resize(Q, m);
  in.V.resize(Q, param.n_s);
  in.sg.resize(Q);
  std::vector<double> row(m);
  for (int i = 0; i < Q; ++i) {
    const double rw = std::sqrt(in.w[i]);
    k.eigenfunctions(in.x[i], row.data());
    const double sg = sgn_pow(in.x[i], m);
    for (int j = 0; j < m; ++j) in.L(i, j) = rw * sg * row[j];
    for (int j = 0; j < param.n_s; ++j) in.V(i, j) = rw * vb.eval(j + 1, in.x[i]);
    in.sg(i) = std::exp(-0.5 * sigma * in.x[i] * in.x[i]);
  }
  return in;
}

double frob_ratio(const Eigen::MatrixXd& D, const Eigen::MatrixXd& P) {
  const double n = P.norm();
  return n > 0.0 ? D.norm() / n : D.norm();
}
}  // namespace

std::vector<double> DampedProjectionGrid::diagonal() const {
  std::vector<double> d(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) d[i] = basis.row(i).squaredNorm() / weights[i];
  return d;
}

DampedProjectionGrid damped_projection(const HPParam& param, double sigma, int m,
                                       const DampedGridSpec& spec) {
  const DampedInputs in = damped_inputs(param, sigma, m, spec);
  const int Q = static_cast<int>(in.x.size());
  DampedProjectionGrid out;
  out.param = param;
  out.sigma = sigma;
  out.m = m;
  out.R = in.R;
  out.nodes = in.x;
  out.weights = in.w;
  out.rank = m + param.n_s;

  // L block: A = sqrt(g) Psi; its Gram matrix is 1 + Psi^T (g - 1) Psi on the grid.
  const Eigen::MatrixXd A = in.sg.asDiagonal() * in.L;
  const Eigen::MatrixXd gram = A.transpose() * A;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  if (es.info() != Eigen::Success) throw EigenFailure("damped_projection: Gram eigensolver failed");
  out.min_gram_eigenvalue = es.eigenvalues()(0);
  if (!(out.min_gram_eigenvalue > 1e-12 * es.eigenvalues()(m - 1)))
    throw NearSingular("damped_projection: damped proxy block is numerically rank deficient");
  // Orthonormal basis A G^{-1/2}, computed in the m-dimensional eigenbasis.
  const Eigen::VectorXd inv_sqrt = es.eigenvalues().cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd U(Q, out.rank);
  U.leftCols(m) = A * es.eigenvectors() * inv_sqrt.asDiagonal();

  for (int j = 0; j < param.n_s; ++j) {
    const Eigen::VectorXd a = in.sg.asDiagonal() * in.V.col(j);
    const double an = a.norm();
    const Eigen::VectorXd pl = U.leftCols(m) * (U.leftCols(m).transpose() * a);
    out.transversality.push_back(pl.norm() / an);
    Eigen::VectorXd r = a;
    for (int pass = 0; pass < 2; ++pass) r -= U.leftCols(m + j) * (U.leftCols(m + j).transpose() * r);
    const double rn = r.norm();
    if (!(rn > 1e-8 * an)) throw NearSingular("damped_projection: damped v_k lies in the proxy span");
    U.col(m + j) = r / rn;
  }
  out.basis = U;
  out.P = U * U.transpose();
  out.trace = out.P.trace();
  const Eigen::MatrixXd P2 = out.P * out.P;
  out.idempotency_residual = frob_ratio(P2 - out.P, out.P);
  out.symmetry_residual = frob_ratio(out.P - out.P.transpose(), out.P);
  return out;
}

Eigen::MatrixXd damped_projection_formula(const HPParam& param, double sigma, int m,
                                          const DampedGridSpec& spec) {
  const DampedInputs in = damped_inputs(param, sigma, m, spec);
  const int Q = static_cast<int>(in.x.size());
  // Pi: grid projection onto the (undamped) proxy span.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(in.L);
  const Eigen::MatrixXd Uq = qr.householderQ() * Eigen::MatrixXd::Identity(Q, m);
  const Eigen::MatrixXd Pi = Uq * Uq.transpose();
  const Eigen::VectorXd gm1 = in.sg.array().square() - 1.0;
  const Eigen::MatrixXd B = Eigen::MatrixXd::Identity(Q, Q) + gm1.asDiagonal() * Pi;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
  if (!(lu.rcond() > 1e-12)) throw NearSingular("damped_projection_formula: 1 + (g - 1) Pi is singular");
  const Eigen::MatrixXd inner = Pi * lu.solve(Pi);
  return in.sg.asDiagonal() * inner * in.sg.asDiagonal();
}

DampedDiagonal damped_dpp_diagonal(const HPParam& param, double sigma, int m, const DampedGridSpec& spec) {
  const auto d = damped_projection(param, sigma, m, spec);
  DampedDiagonal out;
  out.x = d.nodes;
  out.w = d.weights;
  out.K = d.diagonal();
  for (std::size_t i = 0; i < out.x.size(); ++i) out.integral += out.K[i] * out.w[i];
  return out;
}

S2Result s2_functional(const Configuration& config, double sigma) {
  if (!(sigma > 0.0)) throw DomainError("s2_functional: sigma must be positive");
  S2Result r;
  r.S2 = config.s2();
  r.weight = std::exp(-sigma * r.S2);
  return r;
}

// --------------------------------------------------------------- export

nlohmann::json damped_header(const DampedProjectionGrid& d) {
  return {{"s", d.param.s},         {"n_s", d.param.n_s},   {"s_prime", d.param.s_prime},
          {"sigma", d.sigma},       {"m", d.m},             {"R", d.R},
          {"nodes", d.nodes},       {"weights", d.weights}, {"rank", d.rank}};
}

void export_matrix(const std::string& path, const Eigen::MatrixXd& M, const nlohmann::json& header) {
  nlohmann::json h = header;
  h["rows"] = M.rows();
  h["cols"] = M.cols();
  h["layout"] = "row-major float64 little-endian";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("export_matrix: cannot open " + path);
  out << h.dump() << '\n';
  std::vector<char> buf(sizeof(double));
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      double v = M(i, j);
      std::memcpy(buf.data(), &v, sizeof v);
      if constexpr (std::endian::native == std::endian::big) std::reverse(buf.begin(), buf.end());
      out.write(buf.data(), sizeof v);
    }
  if (!out) throw Error("export_matrix: write failed for " + path);
}

Eigen::MatrixXd import_matrix(const std::string& path, nlohmann::json* header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("import_matrix: cannot open " + path);
  std::string line;
  std::getline(in, line);
  const auto h = nlohmann::json::parse(line);
  const auto rows = h.at("rows").get<Eigen::Index>();
  const auto cols = h.at("cols").get<Eigen::Index>();
  Eigen::MatrixXd M(rows, cols);
  std::vector<char> buf(sizeof(double));
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      in.read(buf.data(), sizeof(double));
      if (!in) throw Error("import_matrix: truncated payload in " + path);
      if constexpr (std::endian::native == std::endian::big) std::reverse(buf.begin(), buf.end());
      double v;
      std::memcpy(&v, buf.data(), sizeof v);
      M(i, j) = v;
    }
  if (header) *header = h;
  return M;
}

}  // namespace hpk
