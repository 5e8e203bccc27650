#include "cmclab/curvature.hpp"

#include <cmath>

#include "cmclab/errors.hpp"

namespace cmc {

namespace {

// toroidal metric in the (mu1, mu2, t) component order
inline Eigen::Vector3d metric_diag(double t) {
  const double s = std::sin(std::sqrt(2.0) * t);
  return {(1.0 + s) / 2.0, (1.0 - s) / 2.0, 0.5};
}

inline Eigen::Vector3d metric_diag_dt(double t) {
  const double c = std::cos(std::sqrt(2.0) * t) * std::sqrt(2.0) / 2.0;
  return {c, -c, 0.0};
}

}  // namespace

PointGeometry immersion_geometry(const ChartJet2& jet, const Eigen::Vector3d& reference) {
  const double t = jet.X(2);
  const Eigen::Vector3d g = metric_diag(t);
  const Eigen::Vector3d gp = metric_diag_dt(t);

  const Eigen::Vector3d T1 = jet.D.col(0);
  const Eigen::Vector3d T2 = jet.D.col(1);

  PointGeometry out;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      double acc = 0;
      for (int c = 0; c < 3; ++c) acc += g(c) * jet.D(c, a) * jet.D(c, b);
      out.metric(a, b) = acc;
    }
  }

  // normal: lowered components via the coordinate cross product
  const Eigen::Vector3d w = T1.cross(T2);
  Eigen::Vector3d N(w(0) / g(0), w(1) / g(1), w(2) / g(2));
  double norm2 = 0;
  for (int c = 0; c < 3; ++c) norm2 += g(c) * N(c) * N(c);
  if (norm2 < 1e-28) throw DegenerateTangent("immersion tangents are degenerate");
  N /= std::sqrt(norm2);
  double orient = 0;
  for (int c = 0; c < 3; ++c) orient += g(c) * N(c) * reference(c);
  if (orient < 0) N = -N;
  out.normal = N;

  // ambient Christoffels of the diagonal metric (only t-derivatives survive):
  // Gamma^t_{aa} = -g_a'/(2 g_t), Gamma^a_{at} = g_a'/(2 g_a) for a = 1,2
  auto covariant_second = [&](int a, int b) {
    Eigen::Vector3d v(jet.DD[0](a, b), jet.DD[1](a, b), jet.DD[2](a, b));
    const Eigen::Vector3d Ta = jet.D.col(a), Tb = jet.D.col(b);
    for (int c = 0; c < 2; ++c) {
      v(2) += -gp(c) / (2.0 * g(2)) * Ta(c) * Tb(c);
      v(c) += gp(c) / (2.0 * g(c)) * (Ta(c) * Tb(2) + Ta(2) * Tb(c));
    }
    return v;
  };
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const Eigen::Vector3d dd = covariant_second(a, b);
      double acc = 0;
      for (int c = 0; c < 3; ++c) acc += g(c) * dd(c) * N(c);
      out.second_form(a, b) = acc;
    }
  }

  const Eigen::Matrix2d shape = out.metric.inverse() * out.second_form;
  out.H = shape.trace();
  out.norm_B_sq = (shape * shape).trace();
  return out;
}

Eigen::Matrix<double, 4, 3> toroidal_frame(const ToroidalPoint& p) {
  const double s = std::sin(std::sqrt(2.0) * p.t);
  const double c = std::cos(std::sqrt(2.0) * p.t);
  const double r1 = std::sqrt((1.0 + s) / 2.0);
  const double r2 = std::sqrt((1.0 - s) / 2.0);
  const double dr1 = std::sqrt(2.0) * c / (4.0 * r1);
  const double dr2 = -std::sqrt(2.0) * c / (4.0 * r2);
  Eigen::Matrix<double, 4, 3> J;
  J.col(0) << -r1 * std::sin(p.mu1), r1 * std::cos(p.mu1), 0, 0;
  J.col(1) << 0, 0, -r2 * std::sin(p.mu2), r2 * std::cos(p.mu2);
  J.col(2) << dr1 * std::cos(p.mu1), dr1 * std::sin(p.mu1), dr2 * std::cos(p.mu2),
      dr2 * std::sin(p.mu2);
  return J;
}

double graph_mean_curvature_point(double u, const Eigen::Vector2d& du, const Eigen::Matrix2d& ddu) {
  // H = sqrt(1 + g^{jk} u_j u_k) * gbar^{ij} ( M_ij + u_ij - Gammabar^k_ij u_k )
  // with M = diag(-cos(2u), +cos(2u))/2 and gbar the induced metric. The
  // normal resolves as Nbar = sqrt2 d_t - gbar^{jk} u_k T_j with
  // |Nbar|^2 = 1/(1 + g^{jk} u_j u_k); validated against symbolic
  // differentiation and the generic immersion engine.
  const double s2u = std::sin(2.0 * u);
  const double c2u = std::cos(2.0 * u);
  if (std::abs(2.0 * u) >= kPi / 2) throw GraphOutOfChart("|2u| must stay below pi/2");
  const double u1 = du(0), u2 = du(1);

  Eigen::Matrix2d gbar;
  gbar(0, 0) = 0.5 * (1.0 + s2u) + u1 * u1;
  gbar(1, 1) = 0.5 * (1.0 - s2u) + u2 * u2;
  gbar(0, 1) = gbar(1, 0) = u1 * u2;
  const Eigen::Matrix2d ginv = gbar.inverse();
  const double q = 2.0 / (1.0 + s2u) * u1 * u1 + 2.0 / (1.0 - s2u) * u2 * u2;

  Eigen::Matrix2d M = Eigen::Matrix2d::Zero();
  M(0, 0) = -0.5 * c2u;
  M(1, 1) = 0.5 * c2u;

  auto dgbar = [&](int k) {
    const double uk = k == 0 ? u1 : u2;
    const double u1k = ddu(0, k), u2k = ddu(1, k);
    Eigen::Matrix2d m;
    m(0, 0) = c2u * uk + 2.0 * u1 * u1k;
    m(1, 1) = -c2u * uk + 2.0 * u2 * u2k;
    m(0, 1) = m(1, 0) = u1k * u2 + u1 * u2k;
    return m;
  };
  const Eigen::Matrix2d dg0 = dgbar(0), dg1 = dgbar(1);
  auto dg = [&](int k) -> const Eigen::Matrix2d& { return k == 0 ? dg0 : dg1; };

  // gbar^{ij} Gammabar^k_{ij} u_k
  double gamma_term = 0;
  for (int k = 0; k < 2; ++k) {
    double acc = 0;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        for (int l = 0; l < 2; ++l) {
          const double christoffel_l = 0.5 * (dg(i)(j, l) + dg(j)(i, l) - dg(l)(i, j));
          acc += ginv(i, j) * ginv(k, l) * christoffel_l;
        }
      }
    }
    gamma_term += acc * (k == 0 ? u1 : u2);
  }

  const double trace = (ginv.array() * (M + ddu).array()).sum();
  return std::sqrt(1.0 + q) * (trace - gamma_term);
}

TorusField graph_mean_curvature(const TorusField& u, DerivScheme scheme) {
  const int n = u.n;
  TorusField u1(n), u2(n), u11(n), u12(n), u22(n);
  if (scheme == DerivScheme::Spectral) {
    ComplexGrid c = fft2(u);
    ComplexGrid c1 = c, c2 = c, c11 = c, c12 = c, c22 = c;
    const std::complex<double> I(0, 1);
    for (int i = 0; i < n; ++i) {
      const double k1 = fft_freq(i, n);
      for (int j = 0; j < n; ++j) {
        const double k2 = fft_freq(j, n);
        c1(i, j) *= I * k1;
        c2(i, j) *= I * k2;
        c11(i, j) *= -k1 * k1;
        c12(i, j) *= -k1 * k2;
        c22(i, j) *= -k2 * k2;
      }
    }
    u1 = ifft2(c1);
    u2 = ifft2(c2);
    u11 = ifft2(c11);
    u12 = ifft2(c12);
    u22 = ifft2(c22);
  } else {
    const double h = 2.0 * kPi / n;
    for (int i = 0; i < n; ++i) {
      const int ip = (i + 1) % n, im = (i + n - 1) % n;
      for (int j = 0; j < n; ++j) {
        const int jp = (j + 1) % n, jm = (j + n - 1) % n;
        u1(i, j) = (u(ip, j) - u(im, j)) / (2 * h);
        u2(i, j) = (u(i, jp) - u(i, jm)) / (2 * h);
        u11(i, j) = (u(ip, j) - 2 * u(i, j) + u(im, j)) / (h * h);
        u22(i, j) = (u(i, jp) - 2 * u(i, j) + u(i, jm)) / (h * h);
        u12(i, j) = (u(ip, jp) - u(ip, jm) - u(im, jp) + u(im, jm)) / (4 * h * h);
      }
    }
  }
  TorusField H(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Eigen::Matrix2d dd;
      dd << u11(i, j), u12(i, j), u12(i, j), u22(i, j);
      H(i, j) = graph_mean_curvature_point(u(i, j), {u1(i, j), u2(i, j)}, dd);
    }
  }
  return H;
}

namespace {

// jet of the tower immersion at chart offsets from a tower vertex
ChartJet2 tower_jet(const SurfaceMesh& mesh, const MeshVertex& vx, double d1, double d2) {
  const double eps = mesh.ns.epsilon;
  const double s = vx.s + d1;
  const double theta = vx.theta + d2;
  const Eigen::Vector2d p = mesh.lattice.cell_points()[vx.tower];
  const double r = eps * std::cosh(s);
  const Eigen::Vector2d e(std::cos(theta), std::sin(theta));
  const Eigen::Vector2d ep(-std::sin(theta), std::cos(theta));
  const Eigen::Vector2d mu = p + r * e;

  ChartJet2 jet;
  jet.X << mu.x(), mu.y(), 0.0;
  const double rs = eps * std::sinh(s);
  Eigen::Matrix2d Dmu;
  Dmu.col(0) = rs * e;
  Dmu.col(1) = r * ep;
  std::array<Eigen::Matrix2d, 2> DDmu;
  for (int c = 0; c < 2; ++c) {
    DDmu[c](0, 0) = r * e(c);
    DDmu[c](0, 1) = DDmu[c](1, 0) = rs * ep(c);
    DDmu[c](1, 1) = -r * e(c);
  }
  for (int c = 0; c < 2; ++c) {
    jet.D(c, 0) = Dmu(c, 0);
    jet.D(c, 1) = Dmu(c, 1);
    jet.DD[c] = DDmu[c];
  }

  if (std::abs(s) <= mesh.s_neck + 1e-12) {
    // exact catenoid graph: t = eps s
    jet.X(2) = eps * s;
    jet.D(2, 0) = eps;
    jet.D(2, 1) = 0;
    jet.DD[2].setZero();
    return jet;
  }

  double gval;
  Eigen::Vector2d gg;
  Eigen::Matrix2d gh;
  mesh.green->jet(mu, gval, gg, gh);
  const ProfileJet pj = profile_jet(mesh.ns, mu, p, gval, gg, gh);
  const double sign = s > 0 ? 1.0 : -1.0;
  jet.X(2) = sign * pj.V;
  for (int a = 0; a < 2; ++a) {
    jet.D(2, a) = sign * pj.dV.dot(Dmu.col(a));
    for (int b = 0; b < 2; ++b) {
      double acc = Dmu.col(a).dot(pj.ddV * Dmu.col(b));
      for (int c = 0; c < 2; ++c) acc += pj.dV(c) * DDmu[c](a, b);
      jet.DD[2](a, b) = sign * acc;
    }
  }
  return jet;
}

ChartJet2 cart_jet(const SurfaceMesh& mesh, const MeshVertex& vx, double d1, double d2) {
  const Eigen::Vector2d mu = vx.mu + Eigen::Vector2d(d1, d2);
  ChartJet2 jet;
  jet.X << mu.x(), mu.y(), 0.0;
  jet.D(0, 0) = 1.0;
  jet.D(1, 1) = 1.0;

  double gval = vx.gval;
  Eigen::Vector2d gg = vx.ggrad;
  Eigen::Matrix2d gh = vx.ghess;
  if (d1 != 0.0 || d2 != 0.0) mesh.green->jet(mu, gval, gg, gh);
  const double sign = vx.sheet >= 0 ? 1.0 : -1.0;
  const Eigen::Vector2d p = mesh.lattice.nearest_point(mu);
  const ProfileJet pj = profile_jet(mesh.ns, mu, p, gval, gg, gh);
  jet.X(2) = sign * pj.V;
  jet.D(2, 0) = sign * pj.dV(0);
  jet.D(2, 1) = sign * pj.dV(1);
  jet.DD[2] = sign * pj.ddV;
  return jet;
}

// fixture charts sit at the constant level t_a
ChartJet2 fixture_jet(const SurfaceMesh& mesh, const MeshVertex& vx, double d1, double d2) {
  ChartJet2 jet;
  jet.X << vx.mu.x() + d1, vx.mu.y() + d2, mesh.ns.t_a;
  jet.D(0, 0) = 1.0;
  jet.D(1, 1) = 1.0;
  return jet;
}

}  // namespace

ChartJet2 vertex_chart_jet_at(const SurfaceMesh& mesh, int v, double d1, double d2) {
  const MeshVertex& vx = mesh.verts[v];
  if (!mesh.green) return fixture_jet(mesh, vx, d1, d2);
  if (vx.tower >= 0) return tower_jet(mesh, vx, d1, d2);
  return cart_jet(mesh, vx, d1, d2);
}

ChartJet2 vertex_chart_jet(const SurfaceMesh& mesh, int v) {
  return vertex_chart_jet_at(mesh, v, 0.0, 0.0);
}

Eigen::Vector3d vertex_reference_direction(const SurfaceMesh& mesh, int v) {
  const MeshVertex& vx = mesh.verts[v];
  if (vx.tower >= 0 && std::abs(vx.s) <= mesh.s_neck + 1e-12) {
    const double cs = std::cosh(vx.s);
    return {-std::cos(vx.theta) / cs, -std::sin(vx.theta) / cs, std::tanh(vx.s)};
  }
  const double sign = vx.sheet >= 0 ? 1.0 : -1.0;
  return {0.0, 0.0, sign};
}

PointGeometry vertex_geometry(const SurfaceMesh& mesh, int v) {
  return immersion_geometry(vertex_chart_jet(mesh, v), vertex_reference_direction(mesh, v));
}

Eigen::Vector4d vertex_normal_r4(const SurfaceMesh& mesh, int v) {
  const PointGeometry geo = vertex_geometry(mesh, v);
  const ChartJet2 jet = vertex_chart_jet(mesh, v);
  const Eigen::Matrix<double, 4, 3> J = toroidal_frame({jet.X(0), jet.X(1), jet.X(2)});
  Eigen::Vector4d N = J * geo.normal;
  return N / N.norm();
}

CurvatureField mesh_mean_curvature(const SurfaceMesh& mesh, bool with_gradient) {
  const int nv = mesh.num_vertices();
  CurvatureField out;
  out.H.resize(nv);
  out.gradH = Eigen::VectorXd::Zero(nv);
  for (int v = 0; v < nv; ++v) {
    const Eigen::Vector3d ref = vertex_reference_direction(mesh, v);
    const PointGeometry geo = immersion_geometry(vertex_chart_jet(mesh, v), ref);
    out.H(v) = geo.H;
    if (!with_gradient) continue;
    const MeshVertex& vx = mesh.verts[v];
    double d1, d2;
    if (vx.tower >= 0) {
      d1 = d2 = 1e-3;
    } else {
      d1 = d2 = 1e-3 * std::max(vx.zeta, 0.02);
    }
    const double Hp1 = immersion_geometry(vertex_chart_jet_at(mesh, v, d1, 0), ref).H;
    const double Hm1 = immersion_geometry(vertex_chart_jet_at(mesh, v, -d1, 0), ref).H;
    const double Hp2 = immersion_geometry(vertex_chart_jet_at(mesh, v, 0, d2), ref).H;
    const double Hm2 = immersion_geometry(vertex_chart_jet_at(mesh, v, 0, -d2), ref).H;
    const Eigen::Vector2d dH((Hp1 - Hm1) / (2 * d1), (Hp2 - Hm2) / (2 * d2));
    const Eigen::Matrix2d ginv = geo.metric.inverse();
    out.gradH(v) = std::sqrt(std::max(0.0, dH.dot(ginv * dH)));
  }
  return out;
}

std::vector<RegionEstimate> verify_estH(const std::vector<const SurfaceMesh*>& meshes) {
  std::vector<RegionEstimate> rows;
  for (const SurfaceMesh* mesh : meshes) {
    const double eps = mesh->ns.epsilon;
    const double L = std::log(1.0 / eps);
    const double Ha = clifford_mean_curvature(mesh->ns.a);
    CurvatureField cf = mesh_mean_curvature(*mesh);

    std::array<RegionEstimate, 4> acc;
    for (int r = 0; r < 4; ++r) {
      acc[r].region = static_cast<Region>(r);
      acc[r].a = mesh->ns.a;
    }
    for (int v = 0; v < mesh->num_vertices(); ++v) {
      const MeshVertex& vx = mesh->verts[v];
      const double err = std::abs(cf.H(v) - Ha);
      const double grad = cf.gradH(v);
      double w = 0, extra = 0;
      switch (vx.region) {
        case Region::CPlus:
        case Region::CMinus:
          w = vx.zeta * vx.zeta / (eps * eps * L);
          extra = vx.zeta;
          break;
        case Region::Transition:
          w = 1.0 / (eps * L);
          extra = vx.zeta;
          break;
        case Region::Neck: {
          const double cs = std::cosh(vx.s);
          w = cs * cs / L;
          extra = eps * cs;
          break;
        }
      }
      auto& row = acc[static_cast<int>(vx.region)];
      row.sup_raw = std::max(row.sup_raw, err);
      row.sup_weighted = std::max(row.sup_weighted, err * w);
      row.sup_weighted_grad = std::max(row.sup_weighted_grad, grad * extra * w);
      row.samples++;
    }
    for (const auto& r : acc) rows.push_back(r);
  }
  return rows;
}

double estimate_spread(const std::vector<RegionEstimate>& rows, Region region) {
  double lo = 1e300, hi = 0;
  for (const auto& r : rows) {
    if (r.region != region || r.samples == 0) continue;
    lo = std::min(lo, r.sup_weighted);
    hi = std::max(hi, r.sup_weighted);
  }
  if (hi == 0) return 0;
  return hi / lo;
}

double global_error_norm(const SurfaceMesh& mesh, double gamma) {
  const double Ha = clifford_mean_curvature(mesh.ns.a);
  CurvatureField cf = mesh_mean_curvature(mesh, false);
  double sup = 0;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    sup = std::max(sup, std::pow(mesh.verts[v].zeta, 2.0 - gamma) * std::abs(cf.H(v) - Ha));
  }
  return sup;
}

}  // namespace cmc
