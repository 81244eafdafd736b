#include "crackcell/assembly.hpp"

#include <cmath>

#include "crackcell/error.hpp"
#include "crackcell/log.hpp"
#include "crackcell/runtime.hpp"

namespace crackcell {

namespace {

inline double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

void gather_scalar(const Model& model, std::int64_t cell,
                   const Eigen::VectorXd& s, Eigen::VectorXd& sloc) {
  const int nloc = model.sdofs.n_loc;
  const std::int32_t* ids = model.sdofs.cell_scalar_ids(cell);
  sloc.resize(nloc);
  for (int a = 0; a < nloc; ++a) sloc[a] = s[ids[a]];
}

void gather_vector(const Model& model, std::int64_t cell,
                   const Eigen::VectorXd& u, Eigen::VectorXd& ux,
                   Eigen::VectorXd& uy, Eigen::VectorXd& uz) {
  const int nloc = model.udofs.n_loc;
  const std::int32_t* ids = model.udofs.cell_scalar_ids(cell);
  ux.resize(nloc);
  uy.resize(nloc);
  uz.resize(nloc);
  for (int a = 0; a < nloc; ++a) {
    ux[a] = u[3 * ids[a]];
    uy[a] = u[3 * ids[a] + 1];
    uz[a] = u[3 * ids[a] + 2];
  }
}

// symmetric gradient at one cached quadrature row; gradients are reference
// derivatives, scaled by 1/h here
Eigen::Matrix3d strain_from_row(const Eigen::MatrixXd& d0,
                                const Eigen::MatrixXd& d1,
                                const Eigen::MatrixXd& d2, std::int64_t row,
                                double inv_h, const Eigen::VectorXd& ux,
                                const Eigen::VectorXd& uy,
                                const Eigen::VectorXd& uz) {
  Eigen::Matrix3d G;
  G(0, 0) = d0.row(row).dot(ux);
  G(0, 1) = d1.row(row).dot(ux);
  G(0, 2) = d2.row(row).dot(ux);
  G(1, 0) = d0.row(row).dot(uy);
  G(1, 1) = d1.row(row).dot(uy);
  G(1, 2) = d2.row(row).dot(uy);
  G(2, 0) = d0.row(row).dot(uz);
  G(2, 1) = d1.row(row).dot(uz);
  G(2, 2) = d2.row(row).dot(uz);
  G *= inv_h;
  return 0.5 * (G + G.transpose());
}

// Triplet buffers per fixed-size chunk keep parallel assembly deterministic.
class ChunkedTriplets {
 public:
  explicit ChunkedTriplets(std::int64_t n_items)
      : buffers_((n_items + kParallelChunk - 1) / kParallelChunk) {}

  std::vector<Eigen::Triplet<double>>& chunk(std::int64_t first_item) {
    return buffers_[static_cast<std::size_t>(first_item / kParallelChunk)];
  }

  SparseMat build(std::int64_t n) {
    std::size_t total = 0;
    for (const auto& b : buffers_) total += b.size();
    std::vector<Eigen::Triplet<double>> all;
    all.reserve(total);
    for (auto& b : buffers_) {
      all.insert(all.end(), b.begin(), b.end());
      b.clear();
      b.shrink_to_fit();
    }
    SparseMat A(n, n);
    A.setFromTriplets(all.begin(), all.end());
    return A;
  }

 private:
  std::vector<std::vector<Eigen::Triplet<double>>> buffers_;
};

// penalty weight per constrained component: list of (component, target)
struct PenaltyTarget {
  bool comps[3] = {false, false, false};
  double value[3] = {0.0, 0.0, 0.0};
};

PenaltyTarget bc_target(const BoundaryCondition& bc, const Eigen::Vector3d& x,
                        double applied) {
  PenaltyTarget t;
  switch (bc.kind) {
    case BcKind::Fixed:
      t.comps[0] = t.comps[1] = t.comps[2] = true;
      break;
    case BcKind::Prescribed:
      t.comps[bc.component] = true;
      t.value[bc.component] = bc.driven ? applied : bc.value;
      break;
    case BcKind::Function: {
      const Eigen::Vector3d v = bc.target_fn(x);
      for (int c = 0; c < 3; ++c) {
        t.comps[c] = true;
        t.value[c] = v[c];
      }
      break;
    }
  }
  return t;
}

}  // namespace

AssembledSystem assemble_elastic(const Model& model, const Eigen::VectorXd& s,
                                 const Eigen::VectorXd& u_lin,
                                 double applied) {
  const std::int64_t n = model.n_udofs();
  const std::int64_t nact = model.grid.n_active();
  const int nloc = model.udofs.n_loc;
  const double h = model.grid.h;
  const double inv_h = 1.0 / h;
  const double cvol = model.grid.cell_volume();
  const double eta = model.laws.eta;

  ChunkedTriplets trip(nact);
  parallel_for(nact, [&](std::int64_t cb, std::int64_t ce) {
    auto& buf = trip.chunk(cb);
    Eigen::VectorXd sloc, ux, uy, uz;
    Eigen::MatrixXd Ke(3 * nloc, 3 * nloc);
    for (std::int64_t c = cb; c < ce; ++c) {
      const int tid = model.quad.cell_template[c];
      const Eigen::MatrixXd& N = model.tables.N[tid];
      const Eigen::MatrixXd& d0 = model.tables.dN[0][tid];
      const Eigen::MatrixXd& d1 = model.tables.dN[1][tid];
      const Eigen::MatrixXd& d2 = model.tables.dN[2][tid];
      const std::int64_t off = model.quad.cell_offset[c];
      const std::int64_t npts = model.quad.cell_points(c);

      gather_scalar(model, c, s, sloc);
      gather_vector(model, c, u_lin, ux, uy, uz);
      Ke.setZero();

      for (std::int64_t q = 0; q < npts; ++q) {
        const double sq = clamp01(N.row(q).dot(sloc));
        const double geff = (1.0 - eta) * sq * sq + eta;
        // sign of tr(eps) under the linearization displacement; zero trace
        // takes the undegraded (compressive) branch
        const double tr =
            (d0.row(q).dot(ux) + d1.row(q).dot(uy) + d2.row(q).dot(uz)) *
            inv_h;
        const std::int64_t p = off + q;
        const double kap = model.mat.kappa0[p];
        const double mu = model.mat.mu[p];
        const double a = tr > 0.0 ? kap * geff : kap;
        const double lam_eff = a - 2.0 * mu * geff / 3.0;
        const double mu_eff = mu * geff;
        const double w =
            model.quad.templates[tid].weights(q) * cvol * model.quad.alpha[p];

        for (int i = 0; i < nloc; ++i) {
          const double gx = d0(q, i) * inv_h;
          const double gy = d1(q, i) * inv_h;
          const double gz = d2(q, i) * inv_h;
          for (int j = 0; j <= i; ++j) {
            const double hx = d0(q, j) * inv_h;
            const double hy = d1(q, j) * inv_h;
            const double hz = d2(q, j) * inv_h;
            const double dot = gx * hx + gy * hy + gz * hz;
            const double gi[3] = {gx, gy, gz};
            const double gj[3] = {hx, hy, hz};
            for (int r = 0; r < 3; ++r)
              for (int cc = 0; cc < 3; ++cc) {
                const double v =
                    w * (lam_eff * gi[r] * gj[cc] + mu_eff * gi[cc] * gj[r] +
                         (r == cc ? mu_eff * dot : 0.0));
                Ke(3 * i + r, 3 * j + cc) += v;
                if (i != j) Ke(3 * j + cc, 3 * i + r) += v;
              }
          }
        }
      }

      const std::int32_t* ids = model.udofs.cell_scalar_ids(c);
      for (int i = 0; i < nloc; ++i)
        for (int r = 0; r < 3; ++r) {
          const std::int64_t gi = 3 * static_cast<std::int64_t>(ids[i]) + r;
          for (int j = 0; j < nloc; ++j)
            for (int cc = 0; cc < 3; ++cc) {
              const std::int64_t gj =
                  3 * static_cast<std::int64_t>(ids[j]) + cc;
              if (gi >= gj)
                buf.emplace_back(static_cast<int>(gi), static_cast<int>(gj),
                                 Ke(3 * i + r, 3 * j + cc));
            }
        }
    }
  });

  AssembledSystem sys;
  sys.b = Eigen::VectorXd::Zero(n);

  // penalty terms: lower triangle of beta * N_a N_b on constrained components
  std::vector<Eigen::Triplet<double>> pen;
  for (std::size_t bi = 0; bi < model.bcs.size(); ++bi) {
    const BoundaryCondition& bc = model.bcs[bi];
    const SurfaceQuadrature& sqd = model.bc_quad[bi];
    const double beta = model.penalty_beta(bc);
    for (std::int64_t qp = 0; qp < sqd.size(); ++qp) {
      const PenaltyTarget tgt = bc_target(bc, sqd.point[qp], applied);
      const double w = beta * sqd.weight[qp] * sqd.alpha[qp];
      const std::int32_t* ids = model.udofs.cell_scalar_ids(sqd.cell[qp]);
      for (int i = 0; i < nloc; ++i) {
        const double ni = sqd.N(qp, i);
        for (int cc = 0; cc < 3; ++cc) {
          if (!tgt.comps[cc]) continue;
          const std::int64_t gi = 3 * static_cast<std::int64_t>(ids[i]) + cc;
          sys.b[gi] += w * ni * tgt.value[cc];
          for (int j = 0; j < nloc; ++j) {
            const std::int64_t gj =
                3 * static_cast<std::int64_t>(ids[j]) + cc;
            if (gi >= gj)
              pen.emplace_back(static_cast<int>(gi), static_cast<int>(gj),
                               w * ni * sqd.N(qp, j));
          }
        }
      }
    }
  }
  trip.chunk(0).insert(trip.chunk(0).end(), pen.begin(), pen.end());
  sys.A = trip.build(n);
  return sys;
}

Eigen::VectorXd elastic_residual(const Model& model, const Eigen::VectorXd& u,
                                 const Eigen::VectorXd& s, double applied) {
  const std::int64_t n = model.n_udofs();
  const std::int64_t nact = model.grid.n_active();
  const int nloc = model.udofs.n_loc;
  const double inv_h = 1.0 / model.grid.h;
  const double cvol = model.grid.cell_volume();
  const double eta = model.laws.eta;

  const std::int64_t nchunks = (nact + kParallelChunk - 1) / kParallelChunk;
  std::vector<Eigen::VectorXd> partial(
      static_cast<std::size_t>(nchunks));
  parallel_for(nact, [&](std::int64_t cb, std::int64_t ce) {
    Eigen::VectorXd& r = partial[static_cast<std::size_t>(cb / kParallelChunk)];
    r = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd sloc, ux, uy, uz;
    for (std::int64_t c = cb; c < ce; ++c) {
      const int tid = model.quad.cell_template[c];
      const Eigen::MatrixXd& N = model.tables.N[tid];
      const Eigen::MatrixXd& d0 = model.tables.dN[0][tid];
      const Eigen::MatrixXd& d1 = model.tables.dN[1][tid];
      const Eigen::MatrixXd& d2 = model.tables.dN[2][tid];
      const std::int64_t off = model.quad.cell_offset[c];
      const std::int64_t npts = model.quad.cell_points(c);
      gather_scalar(model, c, s, sloc);
      gather_vector(model, c, u, ux, uy, uz);
      const std::int32_t* ids = model.udofs.cell_scalar_ids(c);

      for (std::int64_t q = 0; q < npts; ++q) {
        const Eigen::Matrix3d eps =
            strain_from_row(d0, d1, d2, q, inv_h, ux, uy, uz);
        const std::int64_t p = off + q;
        MaterialPoint m;
        m.lambda = model.mat.lambda[p];
        m.mu = model.mat.mu[p];
        m.kappa0 = model.mat.kappa0[p];
        const double sq = clamp01(N.row(q).dot(sloc));
        const Eigen::Matrix3d sig = degraded_stress(eps, m, sq, eta);
        const double w =
            model.quad.templates[tid].weights(q) * cvol * model.quad.alpha[p];
        for (int i = 0; i < nloc; ++i) {
          const double gx = d0(q, i) * inv_h;
          const double gy = d1(q, i) * inv_h;
          const double gz = d2(q, i) * inv_h;
          const std::int64_t base = 3 * static_cast<std::int64_t>(ids[i]);
          r[base] += w * (sig(0, 0) * gx + sig(0, 1) * gy + sig(0, 2) * gz);
          r[base + 1] +=
              w * (sig(1, 0) * gx + sig(1, 1) * gy + sig(1, 2) * gz);
          r[base + 2] +=
              w * (sig(2, 0) * gx + sig(2, 1) * gy + sig(2, 2) * gz);
        }
      }
    }
  });

  Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
  for (const auto& pr : partial)
    if (pr.size() == n) r += pr;

  // penalty forces beta (u - target) on constrained components
  for (std::size_t bi = 0; bi < model.bcs.size(); ++bi) {
    const BoundaryCondition& bc = model.bcs[bi];
    const SurfaceQuadrature& sqd = model.bc_quad[bi];
    const double beta = model.penalty_beta(bc);
    Eigen::VectorXd ux, uy, uz;
    for (std::int64_t qp = 0; qp < sqd.size(); ++qp) {
      gather_vector(model, sqd.cell[qp], u, ux, uy, uz);
      const PenaltyTarget tgt = bc_target(bc, sqd.point[qp], applied);
      const double upt[3] = {sqd.N.row(qp).dot(ux), sqd.N.row(qp).dot(uy),
                             sqd.N.row(qp).dot(uz)};
      const double w = beta * sqd.weight[qp] * sqd.alpha[qp];
      const std::int32_t* ids = model.udofs.cell_scalar_ids(sqd.cell[qp]);
      for (int cc = 0; cc < 3; ++cc) {
        if (!tgt.comps[cc]) continue;
        const double gap = upt[cc] - tgt.value[cc];
        for (int i = 0; i < nloc; ++i)
          r[3 * static_cast<std::int64_t>(ids[i]) + cc] +=
              w * gap * sqd.N(qp, i);
      }
    }
  }
  return r;
}

AssembledSystem assemble_phasefield(const Model& model,
                                    const Eigen::VectorXd& H, double l0,
                                    std::span<const ScalarBc> sbcs) {
  if (l0 <= 0.0) throw Error("assemble_phasefield: l0 must be positive");
  const std::int64_t n = model.n_sdofs();
  const std::int64_t nact = model.grid.n_active();
  const int nloc = model.sdofs.n_loc;
  const double inv_h = 1.0 / model.grid.h;
  const double cvol = model.grid.cell_volume();
  const double eta = model.laws.eta;
  const double l0sq4 = 4.0 * l0 * l0;

  ChunkedTriplets trip(nact);
  const std::int64_t nchunks = (nact + kParallelChunk - 1) / kParallelChunk;
  std::vector<Eigen::VectorXd> partial(static_cast<std::size_t>(nchunks));

  parallel_for(nact, [&](std::int64_t cb, std::int64_t ce) {
    auto& buf = trip.chunk(cb);
    Eigen::VectorXd& bloc =
        partial[static_cast<std::size_t>(cb / kParallelChunk)];
    bloc = Eigen::VectorXd::Zero(n);
    Eigen::MatrixXd Ke(nloc, nloc);
    for (std::int64_t c = cb; c < ce; ++c) {
      const int tid = model.quad.cell_template[c];
      const Eigen::MatrixXd& N = model.tables.N[tid];
      const Eigen::MatrixXd& d0 = model.tables.dN[0][tid];
      const Eigen::MatrixXd& d1 = model.tables.dN[1][tid];
      const Eigen::MatrixXd& d2 = model.tables.dN[2][tid];
      const std::int64_t off = model.quad.cell_offset[c];
      const std::int64_t npts = model.quad.cell_points(c);
      const std::int32_t* ids = model.sdofs.cell_scalar_ids(c);
      Ke.setZero();
      for (std::int64_t q = 0; q < npts; ++q) {
        const std::int64_t p = off + q;
        const double w =
            model.quad.templates[tid].weights(q) * cvol * model.quad.alpha[p];
        const double react =
            4.0 * l0 * (1.0 - eta) * H[p] / model.mat.Gc[p] + 1.0;
        for (int i = 0; i < nloc; ++i) {
          const double gx = d0(q, i) * inv_h;
          const double gy = d1(q, i) * inv_h;
          const double gz = d2(q, i) * inv_h;
          bloc[ids[i]] += w * N(q, i);
          for (int j = 0; j <= i; ++j) {
            const double grad = gx * d0(q, j) * inv_h + gy * d1(q, j) * inv_h +
                                gz * d2(q, j) * inv_h;
            Ke(i, j) += w * (l0sq4 * grad + react * N(q, i) * N(q, j));
          }
        }
      }
      for (int i = 0; i < nloc; ++i)
        for (int j = 0; j <= i; ++j) {
          const std::int64_t gi = ids[i], gj = ids[j];
          const double v = Ke(i, j);
          if (gi >= gj)
            buf.emplace_back(static_cast<int>(gi), static_cast<int>(gj), v);
          else
            buf.emplace_back(static_cast<int>(gj), static_cast<int>(gi), v);
        }
    }
  });

  AssembledSystem sys;
  sys.b = Eigen::VectorXd::Zero(n);
  for (const auto& pb : partial)
    if (pb.size() == n) sys.b += pb;

  std::vector<Eigen::Triplet<double>> pen;
  for (const ScalarBc& sbc : sbcs) {
    const SurfaceQuadrature& sqd = *sbc.surface;
    for (std::int64_t qp = 0; qp < sqd.size(); ++qp) {
      const double w = sbc.beta * sqd.weight[qp] * sqd.alpha[qp];
      const std::int32_t* ids = model.sdofs.cell_scalar_ids(sqd.cell[qp]);
      for (int i = 0; i < nloc; ++i) {
        sys.b[ids[i]] += w * sqd.N(qp, i) * sbc.value;
        for (int j = 0; j < nloc; ++j) {
          if (ids[i] >= ids[j])
            pen.emplace_back(ids[i], ids[j], w * sqd.N(qp, i) * sqd.N(qp, j));
        }
      }
    }
  }
  trip.chunk(0).insert(trip.chunk(0).end(), pen.begin(), pen.end());
  sys.A = trip.build(n);
  return sys;
}

Eigen::VectorXd phasefield_residual(const Model& model,
                                    const Eigen::VectorXd& s,
                                    const Eigen::VectorXd& H, double l0,
                                    std::span<const ScalarBc> sbcs) {
  AssembledSystem sys = assemble_phasefield(model, H, l0, sbcs);
  return sys.A.selfadjointView<Eigen::Lower>() * s - sys.b;
}

Eigen::VectorXd tensile_energy(const Model& model, const Eigen::VectorXd& u) {
  const std::int64_t npts = model.quad.total_points();
  Eigen::VectorXd psi(npts);
  const std::int64_t nact = model.grid.n_active();
  const double inv_h = 1.0 / model.grid.h;
  parallel_for(nact, [&](std::int64_t cb, std::int64_t ce) {
    Eigen::VectorXd ux, uy, uz;
    for (std::int64_t c = cb; c < ce; ++c) {
      const int tid = model.quad.cell_template[c];
      const Eigen::MatrixXd& d0 = model.tables.dN[0][tid];
      const Eigen::MatrixXd& d1 = model.tables.dN[1][tid];
      const Eigen::MatrixXd& d2 = model.tables.dN[2][tid];
      const std::int64_t off = model.quad.cell_offset[c];
      const std::int64_t n = model.quad.cell_points(c);
      gather_vector(model, c, u, ux, uy, uz);
      for (std::int64_t q = 0; q < n; ++q) {
        const Eigen::Matrix3d eps =
            strain_from_row(d0, d1, d2, q, inv_h, ux, uy, uz);
        const std::int64_t p = off + q;
        const double tr = eps.trace();
        const double trp = tr > 0.0 ? tr : 0.0;
        const double devsq =
            (eps - (tr / 3.0) * Eigen::Matrix3d::Identity()).squaredNorm();
        psi[p] = 0.5 * model.mat.kappa0[p] * trp * trp +
                 model.mat.mu[p] * devsq;
      }
    }
  });
  return psi;
}

void update_history(const Model& model, const Eigen::VectorXd& u,
                    Eigen::VectorXd& H) {
  const Eigen::VectorXd psi = tensile_energy(model, u);
  H = H.cwiseMax(psi);
}

Eigen::VectorXd phase_at_points(const Model& model, const Eigen::VectorXd& s) {
  const std::int64_t npts = model.quad.total_points();
  Eigen::VectorXd sp(npts);
  const std::int64_t nact = model.grid.n_active();
  parallel_for(nact, [&](std::int64_t cb, std::int64_t ce) {
    Eigen::VectorXd sloc;
    for (std::int64_t c = cb; c < ce; ++c) {
      const int tid = model.quad.cell_template[c];
      const Eigen::MatrixXd& N = model.tables.N[tid];
      const std::int64_t off = model.quad.cell_offset[c];
      const std::int64_t n = model.quad.cell_points(c);
      gather_scalar(model, c, s, sloc);
      for (std::int64_t q = 0; q < n; ++q) sp[off + q] = N.row(q).dot(sloc);
    }
  });
  return sp;
}

Eigen::Vector3d reaction_force(const Model& model, const FieldState& state,
                               std::size_t bc_index) {
  if (bc_index >= model.bcs.size())
    throw Error("reaction_force: boundary condition index out of range");
  const SurfaceQuadrature& sqd = model.bc_quad[bc_index];
  const double eta = model.laws.eta;
  Eigen::Vector3d F = Eigen::Vector3d::Zero();
  Eigen::VectorXd sloc, ux, uy, uz;
  for (std::int64_t qp = 0; qp < sqd.size(); ++qp) {
    const std::int64_t c = sqd.cell[qp];
    gather_scalar(model, c, state.s, sloc);
    gather_vector(model, c, state.u, ux, uy, uz);
    Eigen::Matrix3d G;
    G(0, 0) = sqd.dNdx.row(qp).dot(ux);
    G(0, 1) = sqd.dNdy.row(qp).dot(ux);
    G(0, 2) = sqd.dNdz.row(qp).dot(ux);
    G(1, 0) = sqd.dNdx.row(qp).dot(uy);
    G(1, 1) = sqd.dNdy.row(qp).dot(uy);
    G(1, 2) = sqd.dNdz.row(qp).dot(uy);
    G(2, 0) = sqd.dNdx.row(qp).dot(uz);
    G(2, 1) = sqd.dNdy.row(qp).dot(uz);
    G(2, 2) = sqd.dNdz.row(qp).dot(uz);
    const Eigen::Matrix3d eps = 0.5 * (G + G.transpose());
    const double spt = clamp01(sqd.N.row(qp).dot(sloc));
    const std::int64_t vid = sqd.voxel[qp];
    const double ash =
        vid < 0 ? image_value_to_ash(0.0, ImageKind::RhoK2hpo4, model.laws)
                : image_value_to_ash(
                      model.image.values[static_cast<std::size_t>(vid)],
                      model.image.kind, model.laws);
    const MaterialPoint m = make_material_point(ash, model.laws);
    const Eigen::Matrix3d sig = degraded_stress(eps, m, spt, eta);
    F += sqd.weight[qp] * sqd.alpha[qp] * (sig * sqd.normal[qp]);
  }
  return F;
}

namespace {

std::int64_t locate_active_cell(const Model& model, const Eigen::Vector3d& x,
                                Eigen::Vector3d& xi) {
  const EmbeddedGrid& g = model.grid;
  Eigen::Vector3i cc;
  for (int a = 0; a < 3; ++a) {
    const double f = (x[a] - g.origin[a]) / g.h;
    if (f < 0.0 || f > static_cast<double>(g.num_cells[a]))
      throw Error("field evaluation: point outside the grid bounding box");
    int ci = static_cast<int>(std::floor(f));
    ci = std::min(std::max(ci, 0), g.num_cells[a] - 1);
    cc[a] = ci;
  }
  const std::int32_t ac = g.active_index[static_cast<std::size_t>(
      g.cell_id(cc[0], cc[1], cc[2]))];
  if (ac < 0)
    throw Error("field evaluation: point lies in an inactive cell");
  const Eigen::Vector3d lo = g.cell_min(cc);
  xi = (x - lo) / g.h;
  for (int a = 0; a < 3; ++a) xi[a] = clamp01(xi[a]);
  return ac;
}

}  // namespace

Eigen::Matrix3d strain_at(const Model& model, const Eigen::VectorXd& u,
                          const Eigen::Vector3d& x) {
  Eigen::Vector3d xi;
  const std::int64_t c = locate_active_cell(model, x, xi);
  Eigen::VectorXd vals;
  Eigen::Matrix<double, Eigen::Dynamic, 3> grads;
  eval_basis(model.basis, xi, vals, grads);
  Eigen::VectorXd ux, uy, uz;
  gather_vector(model, c, u, ux, uy, uz);
  const double inv_h = 1.0 / model.grid.h;
  Eigen::Matrix3d G;
  for (int r = 0; r < 3; ++r) {
    const Eigen::VectorXd& comp = r == 0 ? ux : (r == 1 ? uy : uz);
    for (int a = 0; a < 3; ++a) G(r, a) = grads.col(a).dot(comp) * inv_h;
  }
  return 0.5 * (G + G.transpose());
}

double scalar_at(const Model& model, const Eigen::VectorXd& s,
                 const Eigen::Vector3d& x) {
  Eigen::Vector3d xi;
  const std::int64_t c = locate_active_cell(model, x, xi);
  Eigen::VectorXd vals;
  Eigen::Matrix<double, Eigen::Dynamic, 3> grads;
  eval_basis(model.basis, xi, vals, grads);
  Eigen::VectorXd sloc;
  gather_scalar(model, c, s, sloc);
  return vals.dot(sloc);
}

Eigen::Vector3d displacement_at(const Model& model, const Eigen::VectorXd& u,
                                const Eigen::Vector3d& x) {
  Eigen::Vector3d xi;
  const std::int64_t c = locate_active_cell(model, x, xi);
  Eigen::VectorXd vals;
  Eigen::Matrix<double, Eigen::Dynamic, 3> grads;
  eval_basis(model.basis, xi, vals, grads);
  Eigen::VectorXd ux, uy, uz;
  gather_vector(model, c, u, ux, uy, uz);
  return {vals.dot(ux), vals.dot(uy), vals.dot(uz)};
}

}  // namespace crackcell
