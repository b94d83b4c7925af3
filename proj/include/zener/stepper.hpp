#pragma once

#include <stdexcept>
#include <utility>

#include "zener/assembly.hpp"
#include "zener/projector.hpp"

namespace zener {

// trapezoidal two-level scheme for the damped second order system
//   M p'' + M_omega p' + K p + B^T r'' = load(t),  B p = 0
// advanced through
//   [M/dt^2 + M_omega/(2dt) + K/4] p+ + (B^T/dt^2) r+ = rhs(k),
//   (1/dt^2) B p+ = 0
template<typename T>
class NewmarkStepper {
  public:
    NewmarkStepper(const Mesh<T>& mesh, const SpaceSet<T>& sp,
                   const MaterialField<T>& field, const SystemBlocks<T>& blocks, T dt)
        : m_mesh(&mesh), m_sp(&sp), m_field(&field), m_blocks(&blocks), m_dt(dt)
    {
        if (!(dt > T(0)))
            throw std::invalid_argument("NewmarkStepper: dt must be positive");
        m_Bt = blocks.B.transpose();
    }

    // second level from a Taylor expansion; the initial pair acceleration
    // solves the semidiscrete system at time zero with the constraint
    // differentiated twice
    template<typename F>
    void start_taylor(const PairProjector<T>& proj, const PairFn<T>& pair0,
                      const PairFn<T>& pair_rate0, const TensorFn<T>& skew0,
                      const TensorFn<T>& skew_rate0, F&& source)
    {
        const DynVec<T> p0 = proj.project(pair0);
        const DynVec<T> p1 = proj.project(pair_rate0);
        const DynVec<T> r0 = l2_project_skew(*m_mesh, *m_sp, skew0);
        const DynVec<T> r1 = l2_project_skew(*m_mesh, *m_sp, skew_rate0);

        const DynVec<T> load0 =
            assemble_load(*m_mesh, *m_sp, *m_field, std::forward<F>(source), T(0));
        DynVec<T> rhs = DynVec<T>::Zero(m_sp->n_S + m_sp->n_Q);
        rhs.segment(0, m_sp->n_S) =
            load0 - m_blocks->M_omega * p1 - m_blocks->K * p0;

        SaddleSolver<T> accel;
        accel.compute(m_blocks->M, m_blocks->B, T(1));
        const DynVec<T> sol = accel.solve(rhs);

        m_p_prev = p0;
        m_p_curr = p0 + m_dt * p1
                 + (m_dt * m_dt / T(2)) * sol.segment(0, m_sp->n_S);
        m_r_prev = r0;
        m_r_curr = r0 + m_dt * r1
                 + (m_dt * m_dt / T(2)) * sol.segment(m_sp->n_S, m_sp->n_Q);
    }

    // second level taken directly from the exact solution at dt
    void start_projection(const PairProjector<T>& proj, const PairFn<T>& pair0,
                          const TensorFn<T>& skew0, const PairFn<T>& pair_dt,
                          const TensorFn<T>& skew_dt)
    {
        m_p_prev = proj.project(pair0);
        m_p_curr = proj.project(pair_dt);
        m_r_prev = l2_project_skew(*m_mesh, *m_sp, skew0);
        m_r_curr = l2_project_skew(*m_mesh, *m_sp, skew_dt);
    }

    void set_state(DynVec<T> p_prev, DynVec<T> p_curr, DynVec<T> r_prev,
                   DynVec<T> r_curr)
    {
        m_p_prev = std::move(p_prev);
        m_p_curr = std::move(p_curr);
        m_r_prev = std::move(r_prev);
        m_r_curr = std::move(r_curr);
    }

    // advance one step given the load assembled at the current time level;
    // the factorization is deferred to the first step so that startup-time
    // projectors do not have to coexist with it
    void step(const DynVec<T>& load_curr)
    {
        const T idt2 = T(1) / (m_dt * m_dt);
        if (!m_factored) {
            const SpMat<T> ul = idt2 * m_blocks->M
                              + (T(1) / (T(2) * m_dt)) * m_blocks->M_omega
                              + T(0.25) * m_blocks->K;
            m_solver.compute(ul, m_blocks->B, idt2);
            m_factored = true;
        }
        DynVec<T> rhs = DynVec<T>::Zero(m_sp->n_S + m_sp->n_Q);
        rhs.segment(0, m_sp->n_S) =
            load_curr + idt2 * (m_blocks->M * (T(2) * m_p_curr - m_p_prev))
            + (T(1) / (T(2) * m_dt)) * (m_blocks->M_omega * m_p_prev)
            - T(0.25) * (m_blocks->K * (T(2) * m_p_curr + m_p_prev))
            + idt2 * (m_Bt * (T(2) * m_r_curr - m_r_prev));

        const DynVec<T> sol = m_solver.solve(rhs);
        m_p_prev = std::move(m_p_curr);
        m_r_prev = std::move(m_r_curr);
        m_p_curr = sol.segment(0, m_sp->n_S);
        m_r_curr = sol.segment(m_sp->n_S, m_sp->n_Q);
    }

    // discrete energy of the current level pair
    T energy() const
    {
        const DynVec<T> rate = (m_p_curr - m_p_prev) / m_dt;
        const DynVec<T> mid = T(0.5) * (m_p_curr + m_p_prev);
        return T(0.5) * rate.dot(m_blocks->M * rate)
             + T(0.5) * mid.dot(m_blocks->K * mid);
    }

    T constraint_residual() const
    {
        return (m_blocks->B * m_p_curr).norm() / std::max(m_p_curr.norm(), T(1));
    }

    const DynVec<T>& pair_prev() const { return m_p_prev; }
    const DynVec<T>& pair_curr() const { return m_p_curr; }
    const DynVec<T>& skew_prev() const { return m_r_prev; }
    const DynVec<T>& skew_curr() const { return m_r_curr; }
    T dt() const { return m_dt; }

  private:
    const Mesh<T>* m_mesh;
    const SpaceSet<T>* m_sp;
    const MaterialField<T>* m_field;
    const SystemBlocks<T>* m_blocks;
    T m_dt;
    SaddleSolver<T> m_solver;
    bool m_factored = false;
    SpMat<T> m_Bt;
    DynVec<T> m_p_prev, m_p_curr, m_r_prev, m_r_curr;
};

// weighted divergence average recovering the acceleration at the middle of
// three consecutive pair levels, plus the projected source
template<typename T, typename F>
DynVec<T> newmark_acceleration(const Mesh<T>& mesh, const SpaceSet<T>& sp,
                               const MaterialField<T>& field,
                               const DynVec<T>& p_next, const DynVec<T>& p_curr,
                               const DynVec<T>& p_prev, F&& f, T time)
{
    const auto quad = make_quadrature<T>(2 * sp.k + 2);
    const DynVec<T> avg = (p_next + T(2) * p_curr + p_prev) / T(4);

    DynVec<T> out = DynVec<T>::Zero(sp.n_U);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto g = geometry(mesh, t);
        const T rho = field.rho_of(mesh.subdomain[t]);
        for (int q = 0; q < quad.size(); ++q) {
            const Vec2<T> x = Vec2<T>(g.p0 + g.J * quad.points[q]);
            const Vec2<T> div_plus = Vec2<T>(
                eval_tensor_div(mesh, sp, t, avg.segment(0, sp.n_W), quad.points[q])
                + eval_tensor_div(mesh, sp, t, avg.segment(sp.n_W, sp.n_W),
                                  quad.points[q]));
            const Vec2<T> val = Vec2<T>((div_plus + Vec2<T>(f(x, time))) / rho);
            for (int c = 0; c < 2; ++c)
                for (int i = 0; i < sp.nloc_scal; ++i)
                    out[sp.u_id(t, c, i)] += quad.weights[q] * val[c]
                                           * sp.scalar.eval(i, quad.points[q]);
        }
    }
    return out;
}

} // namespace zener
