#include "cmclab/glue.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "cmclab/errors.hpp"

namespace cmc {

NeckScale neck_scale(double a, double gamma_lambda) {
  if (!(a > 0 && a <= 0.2)) throw ParamOutOfRange("neck scale regime is 0 < a <= 0.2");
  NeckScale ns;
  ns.a = a;
  ns.gamma_lambda = gamma_lambda;
  ns.t_a = std::asin(a) / std::sqrt(2.0);

  // F(eps) = -eps log eps + eps (gamma + log 2) increases up to
  // eps* = exp(gamma + log2 - 1); bisect on (0, eps*).
  const double c = gamma_lambda + std::log(2.0);
  const double eps_star = std::exp(c - 1.0);
  auto F = [&](double e) { return -e * std::log(e) + c * e; };
  if (ns.t_a >= F(eps_star)) {
    throw NoSolution("a too large for the monotone neck-scale branch");
  }
  double lo = 1e-300, hi = eps_star;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (F(mid) < ns.t_a ? lo : hi) = mid;
  }
  ns.epsilon = 0.5 * (lo + hi);
  if (std::abs(F(ns.epsilon) - ns.t_a) > 1e-12) {
    throw NoSolution("neck-scale bisection did not converge");
  }
  return ns;
}

double eta_blend(double x) {
  if (x <= 0.5) return 0.0;
  if (x >= 2.0) return 1.0;
  return smoothstep5(std::log(2.0 * x) / std::log(4.0));
}

void eta_blend_jet(double x, double& val, double& d1, double& d2) {
  if (x <= 0.5 || x >= 2.0) {
    val = x >= 2.0 ? 1.0 : 0.0;
    d1 = d2 = 0.0;
    return;
  }
  const double l4 = std::log(4.0);
  const double u = std::log(2.0 * x) / l4;
  val = smoothstep5(u);
  d1 = smoothstep5_d1(u) / (x * l4);
  d2 = smoothstep5_d2(u) / (x * x * l4 * l4) - smoothstep5_d1(u) / (x * x * l4);
}

ProfileJet profile_jet(const NeckScale& ns, const Eigen::Vector2d& mu, const Eigen::Vector2d& p,
                       double gval, const Eigen::Vector2d& ggrad, const Eigen::Matrix2d& ghess) {
  const double eps = ns.epsilon;
  const Eigen::Vector2d d = mu - p;
  const double r = d.norm();
  if (r <= eps) throw GraphOutOfChart("graph profile requested at the neck waist");
  const double x = r / std::sqrt(eps);
  ProfileJet out;

  const double A = ns.t_a - eps * gval;
  const Eigen::Vector2d dA = -eps * ggrad;
  const Eigen::Matrix2d ddA = -eps * ghess;

  if (x >= 2.0) {
    out.V = A;
    out.dV = dA;
    out.ddV = ddA;
    return out;
  }

  const Eigen::Vector2d er = d / r;
  const Eigen::Matrix2d proj = Eigen::Matrix2d::Identity() - er * er.transpose();

  const double B = eps * std::acosh(r / eps);
  const double dBdr = eps / std::sqrt(r * r - eps * eps);
  const double ddBdr = -eps * r / std::pow(r * r - eps * eps, 1.5);
  const Eigen::Vector2d dB = dBdr * er;
  const Eigen::Matrix2d ddB = ddBdr * er * er.transpose() + (dBdr / r) * proj;

  if (x <= 0.5) {
    out.V = B;
    out.dV = dB;
    out.ddV = ddB;
    return out;
  }

  double eta, etap, etapp;
  eta_blend_jet(x, eta, etap, etapp);
  const double se = std::sqrt(eps);
  const Eigen::Vector2d dx = er / se;
  const Eigen::Matrix2d ddx = proj / (r * se);
  const Eigen::Vector2d deta = etap * dx;
  const Eigen::Matrix2d ddeta = etapp * dx * dx.transpose() + etap * ddx;

  out.V = eta * A + (1.0 - eta) * B;
  out.dV = deta * (A - B) + eta * dA + (1.0 - eta) * dB;
  out.ddV = ddeta * (A - B) + deta * (dA - dB).transpose() + (dA - dB) * deta.transpose() +
            eta * ddA + (1.0 - eta) * ddB;
  return out;
}

double transition_profile(const Eigen::Vector2d& mu, const NeckScale& ns, const GreenFunction& g) {
  const Eigen::Vector2d p = g.lattice().nearest_point(mu);
  const double r = (mu - p).norm();
  const double se = std::sqrt(ns.epsilon);
  if (r < se / 2 - 1e-14 || r > 2 * se + 1e-14) {
    throw OutsideAnnulus("transition annulus is sqrt(eps)/2 <= |mu| <= 2 sqrt(eps)");
  }
  double gval;
  Eigen::Vector2d gg;
  Eigen::Matrix2d gh;
  g.jet(mu, gval, gg, gh);
  return profile_jet(ns, mu, p, gval, gg, gh).V;
}

namespace {

// generalized cross product in R^4: orthogonal to a, b, c
Eigen::Vector4d cross4(const Eigen::Vector4d& a, const Eigen::Vector4d& b,
                       const Eigen::Vector4d& c) {
  Eigen::Vector4d out;
  for (int i = 0; i < 4; ++i) {
    Eigen::Matrix3d m;
    int col = 0;
    for (int j = 0; j < 4; ++j) {
      if (j == i) continue;
      m(0, col) = a(j);
      m(1, col) = b(j);
      m(2, col) = c(j);
      ++col;
    }
    out(i) = ((i % 2) ? -1.0 : 1.0) * m.determinant();
  }
  return out;
}

int lattice_point_index(const LatticeSpec& spec, const Eigen::Vector2d& q) {
  const double twopi = 2.0 * kPi;
  auto wrap = [&](double v) {
    double w = std::fmod(v, twopi);
    if (w < 0) w += twopi;
    if (twopi - w < 1e-9) w = 0;
    return w;
  };
  const Eigen::Vector2d qq(wrap(q.x()), wrap(q.y()));
  const auto& pts = spec.cell_points();
  for (std::size_t t = 0; t < pts.size(); ++t) {
    if ((pts[t] - qq).norm() < 1e-9) return static_cast<int>(t);
  }
  throw StitchMismatch("group image is not a lattice cell point");
}

// smallest grid size divisor putting every cell point on the grid
int grid_alignment(const LatticeSpec& spec) {
  std::int64_t L = 1;
  for (const auto& p : spec.cell_points()) {
    for (double coord : {p.x(), p.y()}) {
      auto r = recognize_pi_rational(coord);
      if (!r) {
        throw SymmetryActionUndefined("lattice cell point is not a rational multiple of pi");
      }
      // coord * n / (2pi) = n * num / (2 den): need (2 den / gcd(num, 2 den)) | n
      const std::int64_t num = r->num < 0 ? -r->num : r->num;
      std::int64_t den2 = 2 * r->den / std::gcd(num == 0 ? 2 * r->den : num, 2 * r->den);
      L = std::lcm(L, den2 == 0 ? 1 : den2);
    }
  }
  return static_cast<int>(L);
}

void fix_orientation(SurfaceMesh& mesh) {
  const int nt = static_cast<int>(mesh.tris.size());
  std::map<std::pair<int, int>, std::vector<int>> edges;
  for (int t = 0; t < nt; ++t) {
    const auto& tr = mesh.tris[t];
    for (int e = 0; e < 3; ++e) {
      int u = tr[e], v = tr[(e + 1) % 3];
      edges[{std::min(u, v), std::max(u, v)}].push_back(t);
    }
  }
  std::vector<char> visited(nt, 0);
  std::vector<int> stack{0};
  visited[0] = 1;
  while (!stack.empty()) {
    int t = stack.back();
    stack.pop_back();
    const auto tr = mesh.tris[t];
    for (int e = 0; e < 3; ++e) {
      int u = tr[e], v = tr[(e + 1) % 3];
      for (int t2 : edges[{std::min(u, v), std::max(u, v)}]) {
        if (t2 == t || visited[t2]) continue;
        const auto& s = mesh.tris[t2];
        bool same_dir = false;
        for (int e2 = 0; e2 < 3; ++e2) {
          if (s[e2] == u && s[(e2 + 1) % 3] == v) same_dir = true;
        }
        if (same_dir) std::swap(mesh.tris[t2][1], mesh.tris[t2][2]);
        visited[t2] = 1;
        stack.push_back(t2);
      }
    }
  }

  // global sign: triangle normals follow +d/dt on the upper sheet
  for (int t = 0; t < nt; ++t) {
    const auto& tr = mesh.tris[t];
    const auto& v0 = mesh.verts[tr[0]];
    if (v0.region != Region::CPlus || v0.tower >= 0) continue;
    const Eigen::Vector4d x0 = v0.pos;
    const Eigen::Vector4d n4 =
        cross4(x0, mesh.verts[tr[1]].pos - x0, mesh.verts[tr[2]].pos - x0);
    const double delta = 1e-6;
    const Eigen::Vector4d up = (toroidal_chart({v0.mu.x(), v0.mu.y(), delta}) -
                                toroidal_chart({v0.mu.x(), v0.mu.y(), -delta})) /
                               (2 * delta);
    if (n4.dot(up) < 0) {
      for (auto& tri : mesh.tris) std::swap(tri[1], tri[2]);
    }
    break;
  }
}

void build_group_tables(SurfaceMesh& mesh) {
  const auto& spec = mesh.lattice;
  const int m = spec.m_lambda;
  const int nv = mesh.num_vertices();
  auto shifts = grid_shifts(spec, mesh.n);
  const auto& pts = spec.cell_points();

  std::vector<std::vector<int>> tower_shift(m, std::vector<int>(m));
  std::vector<int> tower_neg(m);
  const bool has_towers = !mesh.tower_id.empty();
  if (has_towers) {
    for (int s = 0; s < m; ++s) {
      for (int t = 0; t < m; ++t) tower_shift[s][t] = lattice_point_index(spec, pts[t] + pts[s]);
    }
    for (int t = 0; t < m; ++t) tower_neg[t] = lattice_point_index(spec, -pts[t]);
  }

  const int nth = mesh.res.n_theta;
  mesh.perms.assign(2 * m, std::vector<int>(nv, -1));
  for (int e = 0; e < 2; ++e) {
    for (int s = 0; s < m; ++s) {
      auto& perm = mesh.perms[e * m + s];
      for (int v = 0; v < nv; ++v) {
        const auto& vx = mesh.verts[v];
        int image = -1;
        if (vx.tower < 0) {
          int i = vx.i + shifts[s][0], j = vx.j + shifts[s][1];
          if (e) {
            i = -i;
            j = -j;
          }
          image = mesh.cart_index(vx.sheet > 0 ? 0 : 1, i, j);
        } else {
          int t = tower_shift[s][vx.tower];
          int j = vx.j;
          if (e) {
            t = tower_neg[t];
            j = (j + nth / 2) % nth;
          }
          image = mesh.tower_id[t][vx.i * nth + j];
        }
        if (image < 0) throw StitchMismatch("group image vertex missing");
        perm[v] = image;
      }
    }
  }

  mesh.orbit_of.assign(nv, -1);
  mesh.orbits.clear();
  for (int v = 0; v < nv; ++v) {
    if (mesh.orbit_of[v] >= 0) continue;
    const int id = static_cast<int>(mesh.orbits.size());
    std::vector<int> members;
    std::vector<int> stack{v};
    mesh.orbit_of[v] = id;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      members.push_back(u);
      for (const auto& perm : mesh.perms) {
        int w = perm[u];
        if (mesh.orbit_of[w] < 0) {
          mesh.orbit_of[w] = id;
          stack.push_back(w);
        }
      }
    }
    std::sort(members.begin(), members.end());
    mesh.orbits.push_back(std::move(members));
  }
}

}  // namespace

Eigen::VectorXd SurfaceMesh::symmetrize(const Eigen::VectorXd& field) const {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(field.size());
  for (const auto& perm : perms) {
    for (int v = 0; v < field.size(); ++v) acc(v) += field(perm[v]);
  }
  return acc / static_cast<double>(perms.size());
}

double SurfaceMesh::symmetry_defect(const Eigen::VectorXd& field) const {
  double worst = 0;
  for (const auto& perm : perms) {
    for (int v = 0; v < field.size(); ++v) {
      worst = std::max(worst, std::abs(field(perm[v]) - field(v)));
    }
  }
  return worst;
}

int SurfaceMesh::euler_characteristic() const {
  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& tr : tris) {
    for (int e = 0; e < 3; ++e) {
      int u = tr[e], v = tr[(e + 1) % 3];
      edge_count[{std::min(u, v), std::max(u, v)}]++;
    }
  }
  for (const auto& [edge, cnt] : edge_count) {
    if (cnt != 2) {
      throw NotWatertight("edge (" + std::to_string(edge.first) + "," +
                          std::to_string(edge.second) + ") lies in " + std::to_string(cnt) +
                          " triangles");
    }
  }
  return num_vertices() - static_cast<int>(edge_count.size()) + static_cast<int>(tris.size());
}

int genus_check(const SurfaceMesh& mesh) { return (2 - mesh.euler_characteristic()) / 2; }

Eigen::VectorXd weight_function(const SurfaceMesh& mesh) {
  Eigen::VectorXd w(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v) w(v) = mesh.verts[v].zeta;
  return w;
}

SurfaceMesh build_approximate_surface(double a, const LatticeSpec& spec,
                                      std::shared_ptr<const GreenFunction> green,
                                      const MeshResolution& res) {
  if (!spec.admissible) throw InadmissibleLattice("glued surface needs an admissible lattice");
  if (res.n_theta % 2 || res.n_theta < 8 || res.n_s < 8 || res.n_s % 2 || res.n_torus < 16) {
    throw ResolutionTooCoarse("need even n_theta >= 8, even n_s >= 8, n_torus >= 16");
  }

  SurfaceMesh mesh;
  mesh.lattice = spec;
  mesh.green = std::move(green);
  mesh.res = res;
  mesh.ns = neck_scale(a, mesh.green->gamma());
  const double eps = mesh.ns.epsilon;
  const double se = std::sqrt(eps);
  const double dmin = spec.min_spacing();

  const int L = grid_alignment(spec);
  mesh.n = ((res.n_torus + L - 1) / L) * L;
  const int n = mesh.n;
  const double h = 2.0 * kPi / n;

  mesh.s_neck = std::acosh(1.0 / (2.0 * se));
  mesh.ds = 2.0 * mesh.s_neck / res.n_s;
  mesh.kappa0 = 0.99 * dmin / 8.0;
  const double S_target = std::acosh(2.0 * mesh.kappa0 / eps);
  const int n_half = static_cast<int>(std::ceil(S_target / mesh.ds));
  mesh.n_rows = 2 * n_half + 1;
  mesh.row_s.resize(mesh.n_rows);
  for (int k = 0; k < mesh.n_rows; ++k) mesh.row_s[k] = (n_half - k) * mesh.ds;
  mesh.r_out = eps * std::cosh(mesh.row_s[0]);
  if (2.0 * mesh.r_out > 0.98 * dmin) {
    throw ResolutionTooCoarse("tower outer radius exceeds half the lattice spacing");
  }

  const auto& pts = spec.cell_points();
  const int nth = res.n_theta;

  // ---- vertices ----
  mesh.tower_id.assign(pts.size(), std::vector<int>(mesh.n_rows * nth, -1));
  for (std::size_t t = 0; t < pts.size(); ++t) {
    for (int k = 0; k < mesh.n_rows; ++k) {
      const double s = mesh.row_s[k];
      const double r = eps * std::cosh(s);
      for (int j = 0; j < nth; ++j) {
        const double theta = 2.0 * kPi * j / nth;
        MeshVertex vx;
        vx.tower = static_cast<int>(t);
        vx.i = k;
        vx.j = j;
        vx.s = s;
        vx.theta = theta;
        vx.mu = pts[t] + r * Eigen::Vector2d(std::cos(theta), std::sin(theta));
        vx.zeta = r;
        vx.sheet = (s > 1e-14) ? +1 : (s < -1e-14 ? -1 : 0);
        if (r <= se / 2 * (1 + 1e-12)) {
          vx.region = Region::Neck;
        } else if (r < 2 * se) {
          vx.region = Region::Transition;
        } else {
          vx.region = (vx.sheet >= 0) ? Region::CPlus : Region::CMinus;
        }
        mesh.green->jet(vx.mu, vx.gval, vx.ggrad, vx.ghess);
        double w;
        if (std::abs(s) <= mesh.s_neck + 1e-12) {
          w = eps * s;  // exact catenoid graph through the neck span
        } else {
          ProfileJet pj = profile_jet(mesh.ns, vx.mu, pts[t], vx.gval, vx.ggrad, vx.ghess);
          w = (s > 0 ? 1.0 : -1.0) * pj.V;
        }
        vx.pos = toroidal_chart({vx.mu.x(), vx.mu.y(), w});
        mesh.tower_id[t][k * nth + j] = static_cast<int>(mesh.verts.size());
        mesh.verts.push_back(std::move(vx));
      }
    }
  }

  for (int sheet01 = 0; sheet01 < 2; ++sheet01) {
    mesh.cart_id[sheet01].assign(n * n, -1);
    const int sign = sheet01 == 0 ? +1 : -1;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const Eigen::Vector2d mu(i * h, j * h);
        const Eigen::Vector2d p = spec.nearest_point(mu);
        const double r = (mu - p).norm();
        if (r <= mesh.r_out + 0.3 * h) continue;
        MeshVertex vx;
        vx.tower = -1;
        vx.i = i;
        vx.j = j;
        vx.mu = mu;
        vx.zeta = r;
        vx.sheet = sign;
        vx.region = sign > 0 ? Region::CPlus : Region::CMinus;
        mesh.green->jet(vx.mu, vx.gval, vx.ggrad, vx.ghess);
        const double w = sign * (mesh.ns.t_a - eps * vx.gval);
        vx.pos = toroidal_chart({mu.x(), mu.y(), w});
        mesh.cart_id[sheet01][i * n + j] = static_cast<int>(mesh.verts.size());
        mesh.verts.push_back(std::move(vx));
      }
    }
  }

  // ---- triangles ----
  for (std::size_t t = 0; t < pts.size(); ++t) {
    for (int k = 0; k + 1 < mesh.n_rows; ++k) {
      for (int j = 0; j < nth; ++j) {
        const int jp = (j + 1) % nth;
        const int v00 = mesh.tower_id[t][k * nth + j];
        const int v01 = mesh.tower_id[t][k * nth + jp];
        const int v10 = mesh.tower_id[t][(k + 1) * nth + j];
        const int v11 = mesh.tower_id[t][(k + 1) * nth + jp];
        mesh.tris.push_back({v00, v01, v11});
        mesh.tris.push_back({v00, v11, v10});
      }
    }
  }
  for (int sheet01 = 0; sheet01 < 2; ++sheet01) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const int v00 = mesh.cart_index(sheet01, i, j);
        const int v10 = mesh.cart_index(sheet01, i + 1, j);
        const int v01 = mesh.cart_index(sheet01, i, j + 1);
        const int v11 = mesh.cart_index(sheet01, i + 1, j + 1);
        if (v00 < 0 || v10 < 0 || v01 < 0 || v11 < 0) continue;
        mesh.tris.push_back({v00, v10, v11});
        mesh.tris.push_back({v00, v11, v01});
      }
    }
  }

  // ---- stitch bands ----
  {
    // hole boundary on the upper sheet around the reference point (0,0)
    std::map<std::pair<int, int>, int> edge_count;
    for (const auto& tr : mesh.tris) {
      const auto& v0 = mesh.verts[tr[0]];
      if (v0.tower >= 0 || v0.sheet < 0) continue;
      for (int e = 0; e < 3; ++e) {
        int u = tr[e], v = tr[(e + 1) % 3];
        edge_count[{std::min(u, v), std::max(u, v)}]++;
      }
    }
    std::vector<int> boundary;
    for (const auto& [edge, cnt] : edge_count) {
      if (cnt != 1) continue;
      for (int v : {edge.first, edge.second}) {
        const auto& vx = mesh.verts[v];
        const Eigen::Vector2d p = spec.nearest_point(vx.mu);
        if (lattice_point_index(spec, p) == 0) boundary.push_back(v);
      }
    }
    std::sort(boundary.begin(), boundary.end());
    boundary.erase(std::unique(boundary.begin(), boundary.end()), boundary.end());

    std::vector<std::array<int, 2>> offsets;
    for (int v : boundary) {
      const auto& vx = mesh.verts[v];
      int oi = vx.i, oj = vx.j;
      if (oi > n / 2) oi -= n;
      if (oj > n / 2) oj -= n;
      offsets.push_back({oi, oj});
    }
    auto angle_of = [](const std::array<int, 2>& o) {
      double p = std::atan2(static_cast<double>(o[1]), static_cast<double>(o[0]));
      if (p < 0) p += 2 * kPi;
      return p;
    };
    std::sort(offsets.begin(), offsets.end(), [&](const auto& A, const auto& B) {
      const double pa = angle_of(A), pb = angle_of(B);
      if (pa != pb) return pa < pb;
      return A[0] * A[0] + A[1] * A[1] < B[0] * B[0] + B[1] * B[1];
    });
    const int nP = static_cast<int>(offsets.size());
    if (nP < 8 || nP % 2) throw StitchMismatch("degenerate hole boundary");
    for (int i = 0; i < nP / 2; ++i) {
      if (offsets[i][0] != -offsets[i + nP / 2][0] || offsets[i][1] != -offsets[i + nP / 2][1]) {
        throw StitchMismatch("hole boundary not symmetric under the involution");
      }
    }

    std::vector<double> phi(nP);
    for (int i = 0; i < nP; ++i) phi[i] = angle_of(offsets[i]);
    auto phi_at = [&](int k) { return (k < nP) ? phi[k] : phi[k - nP] + 2 * kPi; };
    auto theta_at = [&](int k) { return 2.0 * kPi * k / nth; };

    // merge pattern over half a turn, replicated by the half rotation so the
    // band itself is invariant under the involution
    struct Step {
      int ip, jr;
      bool ring;
    };
    std::vector<Step> steps;
    {
      int ip = 0;
      int jr = static_cast<int>(std::lround(phi[0] / (2 * kPi / nth)));
      while (theta_at(jr) < phi[0] - kPi) ++jr;
      while (theta_at(jr) > phi[0] + kPi) --jr;
      const int ip_end = nP / 2, jr_end = jr + nth / 2;
      while (ip < ip_end || jr < jr_end) {
        bool advance_ring;
        if (ip >= ip_end) {
          advance_ring = true;
        } else if (jr >= jr_end) {
          advance_ring = false;
        } else {
          advance_ring = theta_at(jr + 1) < phi_at(ip + 1);
        }
        steps.push_back({ip, jr, advance_ring});
        if (advance_ring) {
          ++jr;
        } else {
          ++ip;
        }
      }
      const int half = static_cast<int>(steps.size());
      for (int q = 0; q < half; ++q) {
        steps.push_back({steps[q].ip + nP / 2, steps[q].jr + nth / 2, steps[q].ring});
      }
    }

    auto shifts = grid_shifts(spec, n);
    for (std::size_t t = 0; t < pts.size(); ++t) {
      for (int sheet01 = 0; sheet01 < 2; ++sheet01) {
        const int ring_row = (sheet01 == 0) ? 0 : mesh.n_rows - 1;
        auto poly_vertex = [&](int k) {
          const auto& o = offsets[((k % nP) + nP) % nP];
          const int id = mesh.cart_index(sheet01, o[0] + shifts[t][0], o[1] + shifts[t][1]);
          if (id < 0) throw StitchMismatch("translated boundary vertex missing");
          return id;
        };
        auto ring_vertex = [&](int k) {
          return mesh.tower_id[t][ring_row * nth + ((k % nth) + nth) % nth];
        };
        for (const auto& st : steps) {
          if (st.ring) {
            mesh.tris.push_back({poly_vertex(st.ip), ring_vertex(st.jr), ring_vertex(st.jr + 1)});
          } else {
            mesh.tris.push_back({poly_vertex(st.ip), ring_vertex(st.jr), poly_vertex(st.ip + 1)});
          }
        }
      }
    }
  }

  fix_orientation(mesh);
  build_group_tables(mesh);
  return mesh;
}

SurfaceMesh build_clifford_fixture(double a, const LatticeSpec& spec, int n) {
  SurfaceMesh mesh;
  mesh.lattice = spec;
  mesh.res.n_torus = n;
  mesh.res.n_theta = 0;
  mesh.res.n_s = 0;
  mesh.ns.a = a;
  mesh.ns.t_a = std::asin(a) / std::sqrt(2.0);
  mesh.ns.epsilon = 0;
  mesh.n = n;
  mesh.n_rows = 0;
  const double h = 2.0 * kPi / n;

  mesh.cart_id[0].assign(n * n, -1);
  mesh.cart_id[1].assign(n * n, -1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      MeshVertex vx;
      vx.tower = -1;
      vx.i = i;
      vx.j = j;
      vx.mu = {i * h, j * h};
      vx.zeta = 1.0;
      vx.sheet = +1;
      vx.region = Region::CPlus;
      vx.pos = toroidal_chart({vx.mu.x(), vx.mu.y(), mesh.ns.t_a});
      mesh.cart_id[0][i * n + j] = static_cast<int>(mesh.verts.size());
      mesh.verts.push_back(std::move(vx));
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int v00 = mesh.cart_index(0, i, j);
      const int v10 = mesh.cart_index(0, i + 1, j);
      const int v01 = mesh.cart_index(0, i, j + 1);
      const int v11 = mesh.cart_index(0, i + 1, j + 1);
      mesh.tris.push_back({v00, v10, v11});
      mesh.tris.push_back({v00, v11, v01});
    }
  }
  fix_orientation(mesh);
  build_group_tables(mesh);
  return mesh;
}

}  // namespace cmc
