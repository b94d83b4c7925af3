#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "zener/mms.hpp"
#include "zener/stepper.hpp"

namespace zener {

// --- experiment configuration -------------------------------------------------

template<typename T>
struct RunConfig {
    std::string experiment = "convergence"; // convergence | locking | energy_decay
    int k = 2;
    int n_min = 8;
    int n_max = 32;
    T final_time = 1;
    bool dt_fixed = false; // default rule is dt = 1/n
    T dt = 0;
    IsotropicMaterial<T> iso{ 1, 1, 3, 3 };
    T rho = 1;
    T omega = 1;
    T lambda_low = 150;  // locking sweep, first lambda
    T lambda_high = 15000;
    int n = 8;       // energy decay mesh
    int steps = 200; // energy decay steps
    bool elastic_limit = false;
    std::uint64_t seed = 12345;
    std::string out = "out.csv";
};

namespace detail {

inline bool power_of_two(int n)
{
    return n >= 1 && (n & (n - 1)) == 0;
}

} // namespace detail

template<typename T>
void validate_config(const RunConfig<T>& cfg)
{
    if (cfg.experiment != "convergence" && cfg.experiment != "locking"
        && cfg.experiment != "energy_decay")
        throw std::invalid_argument("unknown experiment: " + cfg.experiment);
    if (cfg.k < 1 || cfg.k > 2)
        throw std::invalid_argument("k must be 1 or 2");
    if (!detail::power_of_two(cfg.n_min) || !detail::power_of_two(cfg.n_max)
        || cfg.n_min > cfg.n_max)
        throw std::invalid_argument("mesh sequence needs powers of two with n_min <= n_max");
    if (!(cfg.final_time > T(0)))
        throw std::invalid_argument("final time must be positive");
    if (cfg.dt_fixed && !(cfg.dt > T(0)))
        throw std::invalid_argument("fixed step rule needs a positive dt");
    if (cfg.n < 1 || cfg.steps < 1)
        throw std::invalid_argument("energy decay needs n >= 1 and steps >= 1");

    MaterialField<T> field;
    field.iso = cfg.iso;
    field.rho = { cfg.rho };
    field.omega = { cfg.omega };
    const auto diag = validate(field, 1);
    if (!diag.ok)
        throw std::invalid_argument("material: " + diag.message);
}

// key=value text, one entry per line, # starts a comment
template<typename T>
RunConfig<T> parse_config(std::istream& in)
{
    RunConfig<T> cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        const auto notblank = line.find_first_not_of(" \t\r");
        if (notblank == std::string::npos)
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno)
                                        + ": expected key=value");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw std::invalid_argument("config line " + std::to_string(lineno)
                                        + ": empty key or value");

        try {
            if (key == "experiment")
                cfg.experiment = val;
            else if (key == "k")
                cfg.k = std::stoi(val);
            else if (key == "n_min")
                cfg.n_min = std::stoi(val);
            else if (key == "n_max")
                cfg.n_max = std::stoi(val);
            else if (key == "T")
                cfg.final_time = T(std::stod(val));
            else if (key == "dt_rule") {
                if (val == "h")
                    cfg.dt_fixed = false;
                else if (val == "fixed")
                    cfg.dt_fixed = true;
                else
                    throw std::invalid_argument("dt_rule must be h or fixed");
            } else if (key == "dt")
                cfg.dt = T(std::stod(val));
            else if (key == "mu")
                cfg.iso.mu = T(std::stod(val));
            else if (key == "lambda")
                cfg.iso.lambda = T(std::stod(val));
            else if (key == "a")
                cfg.iso.a = T(std::stod(val));
            else if (key == "b")
                cfg.iso.b = T(std::stod(val));
            else if (key == "rho")
                cfg.rho = T(std::stod(val));
            else if (key == "omega")
                cfg.omega = T(std::stod(val));
            else if (key == "lambda_low")
                cfg.lambda_low = T(std::stod(val));
            else if (key == "lambda_high")
                cfg.lambda_high = T(std::stod(val));
            else if (key == "n")
                cfg.n = std::stoi(val);
            else if (key == "steps")
                cfg.steps = std::stoi(val);
            else if (key == "elastic_limit")
                cfg.elastic_limit = (val == "1" || val == "true");
            else if (key == "seed")
                cfg.seed = std::stoull(val);
            else if (key == "out")
                cfg.out = val;
            else
                throw std::invalid_argument("unknown key " + key);
        } catch (const std::invalid_argument&) {
            throw;
        } catch (const std::exception&) {
            throw std::invalid_argument("config line " + std::to_string(lineno)
                                        + ": bad value for " + key);
        }
    }
    return cfg;
}

template<typename T>
RunConfig<T> load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open config file " + path);
    return parse_config<T>(in);
}

// --- manufactured solution runs -----------------------------------------------

template<typename T>
struct MeshErrors {
    T e_p, e_r, e_accel;
};

// full fully discrete run against the manufactured solution, reporting the
// relative pair error in the graph norm and the rotation error at the last
// half step plus the recovered acceleration error one level earlier
template<typename T>
MeshErrors<T> solve_manufactured(int n, int k, const IsotropicMaterial<T>& iso,
                                 T rho, T omega, T final_time, T dt_fixed = T(0))
{
    const auto mesh = build_uniform<T>(n);
    const auto sp = build_spaces(mesh, k);
    MaterialField<T> field;
    field.iso = iso;
    field.rho = { rho };
    field.omega = { omega };
    const auto diag = validate(field, mesh.num_subdomains);
    if (!diag.ok)
        throw std::invalid_argument("material: " + diag.message);

    auto blocks = assemble_blocks(mesh, sp, field);

    ExactSolution<T> s;
    s.iso = iso;
    s.rho = rho;
    s.omega = omega;

    const T dt = dt_fixed > T(0) ? dt_fixed : T(1) / T(n);
    const int L = int(std::lround(double(final_time / dt)));
    if (L < 2)
        throw std::invalid_argument("run too short: need at least two steps");

    NewmarkStepper<T> st(mesh, sp, field, blocks, dt);
    {
        // scoped so its factorization is released before the stepper builds
        // its own (the two together dominate the memory peak on fine meshes)
        const PairProjector<T> proj(mesh, sp, field, blocks);
        st.start_taylor(proj, s.pair_at(T(0)), s.pair_rate_at(T(0)),
                        s.rotation_at(T(0)), s.rotation_rate_at(T(0)), s.source());
    }
    // the time loop reads only M, M_omega, K and B; drop the rest
    blocks.K1 = SpMat<T>();
    blocks.G = SpMat<T>();
    blocks.B_U = SpMat<T>();

    DynVec<T> p_before = st.pair_prev();
    for (int step = 1; step < L; ++step) {
        p_before = st.pair_prev();
        const DynVec<T> load =
            assemble_load(mesh, sp, field, s.source(), T(step) * dt);
        st.step(load);
        if (!(st.constraint_residual() < T(1e-9)))
            throw std::runtime_error("constraint residual blew up at step "
                                     + std::to_string(step));
    }

    const T t_half = (T(L) - T(0.5)) * dt;
    const T t_back = T(L - 1) * dt;
    const DynVec<T> p_mid = T(0.5) * (st.pair_curr() + st.pair_prev());
    const DynVec<T> r_mid = T(0.5) * (st.skew_curr() + st.skew_prev());
    const DynVec<T> accel = newmark_acceleration(
        mesh, sp, field, st.pair_curr(), st.pair_prev(), p_before, s.source(), t_back);

    const int degree = 2 * k + 2;
    const auto [pe, pn] = pair_error(mesh, sp, p_mid, s.pair_at(t_half), degree);
    const auto [re, rn] = skew_error(mesh, sp, r_mid, s.rotation_at(t_half), degree);
    const auto [ae, an] = vector_error(mesh, sp, accel, s.accel_at(t_back), degree);
    return { pe / pn, re / rn, ae / an };
}

// --- rate tables ---------------------------------------------------------------

template<typename T>
struct ConvergenceRow {
    T h;
    T e_p, r_p;
    T e_r, r_r;
    T e_accel, r_accel;
    bool has_rates = false;
};

template<typename T>
std::vector<ConvergenceRow<T>> run_convergence(const RunConfig<T>& cfg)
{
    std::vector<ConvergenceRow<T>> rows;
    for (int n = cfg.n_min; n <= cfg.n_max; n *= 2) {
        const auto err =
            solve_manufactured(n, cfg.k, cfg.iso, cfg.rho, cfg.omega,
                               cfg.final_time, cfg.dt_fixed ? cfg.dt : T(0));
        ConvergenceRow<T> row;
        row.h = T(1) / T(n);
        row.e_p = err.e_p;
        row.e_r = err.e_r;
        row.e_accel = err.e_accel;
        if (!rows.empty()) {
            const auto& prev = rows.back();
            const T denom = std::log(prev.h / row.h);
            row.r_p = std::log(prev.e_p / row.e_p) / denom;
            row.r_r = std::log(prev.e_r / row.e_r) / denom;
            row.r_accel = std::log(prev.e_accel / row.e_accel) / denom;
            row.has_rates = true;
        } else {
            row.r_p = row.r_r = row.r_accel = T(0);
        }
        rows.push_back(row);
    }
    return rows;
}

// final-pair rate windows used by both the driver verdict and the
// acceptance harness
template<typename T>
bool convergence_pass(const std::vector<ConvergenceRow<T>>& rows, int k)
{
    if (rows.size() < 2)
        return false;
    const auto& last = rows.back();
    if (k == 2)
        return last.r_p >= T(1.8) && last.r_p <= T(2.3) && last.r_r >= T(1.8)
            && last.r_r <= T(2.3) && last.r_accel >= T(1.8)
            && last.r_accel <= T(2.3);
    return last.r_p >= T(0.85) && last.r_p <= T(1.25);
}

template<typename T>
struct LockingResult {
    std::vector<ConvergenceRow<T>> low;  // lambda_low sweep
    std::vector<ConvergenceRow<T>> high; // lambda_high sweep
};

template<typename T>
LockingResult<T> run_locking(const RunConfig<T>& cfg)
{
    LockingResult<T> result;
    RunConfig<T> sub = cfg;
    sub.iso.lambda = cfg.lambda_low;
    result.low = run_convergence(sub);
    sub.iso.lambda = cfg.lambda_high;
    result.high = run_convergence(sub);
    return result;
}

template<typename T>
bool locking_pass(const LockingResult<T>& result)
{
    if (result.low.size() != result.high.size() || result.low.size() < 2)
        return false;
    const T rl = result.low.back().r_p;
    const T rh = result.high.back().r_p;
    if (!(rl >= T(1.8) && rl <= T(2.4) && rh >= T(1.8) && rh <= T(2.4)))
        return false;
    for (std::size_t i = 0; i < result.low.size(); ++i) {
        const T a = result.low[i].e_p, b = result.high[i].e_p;
        if (std::max(a, b) > T(2) * std::min(a, b))
            return false;
    }
    return true;
}

// --- energy decay --------------------------------------------------------------

template<typename T>
struct EnergySample {
    int step;
    T time;
    T energy;
    T constraint_residual;
};

template<typename T>
struct EnergyDecayResult {
    std::vector<EnergySample<T>> series;
    bool monotone = false;
    T max_growth = 0; // worst relative uptick between consecutive samples
};

namespace detail {

// random pair coefficients projected onto the constraint kernel
template<typename T>
DynVec<T> kernel_projected_random(const SystemBlocks<T>& blocks, int n_S, int n_Q,
                                  std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    DynVec<T> v(n_S);
    for (int i = 0; i < n_S; ++i)
        v[i] = T(d(rng));
    SaddleSolver<T> solver;
    solver.compute(blocks.G, blocks.B, T(1));
    DynVec<T> rhs = DynVec<T>::Zero(n_S + n_Q);
    rhs.segment(0, n_S) = blocks.G * v;
    return solver.solve(rhs).segment(0, n_S);
}

} // namespace detail

template<typename T>
EnergyDecayResult<T> run_energy_decay(const RunConfig<T>& cfg)
{
    const auto mesh = build_uniform<T>(cfg.n);
    const auto sp = build_spaces(mesh, cfg.k);
    MaterialField<T> field;
    field.iso = cfg.iso;
    field.rho = { cfg.rho };
    field.omega = { cfg.omega };
    auto blocks = assemble_blocks(mesh, sp, field);
    if (cfg.elastic_limit)
        blocks.M_omega.setZero();

    std::mt19937_64 rng(cfg.seed);
    const DynVec<T> w1 = detail::kernel_projected_random(blocks, sp.n_S, sp.n_Q, rng);
    const DynVec<T> w2 = detail::kernel_projected_random(blocks, sp.n_S, sp.n_Q, rng);

    const T dt = cfg.dt_fixed ? cfg.dt : T(1) / T(cfg.n);
    NewmarkStepper<T> st(mesh, sp, field, blocks, dt);
    const DynVec<T> zq = DynVec<T>::Zero(sp.n_Q);
    st.set_state(w1, DynVec<T>(w1 + dt * w2), zq, zq);

    EnergyDecayResult<T> result;
    result.series.push_back({ 0, dt / T(2), st.energy(), st.constraint_residual() });
    const T e0 = st.energy();
    const DynVec<T> zero_load = DynVec<T>::Zero(sp.n_S);
    result.monotone = true;
    for (int k = 1; k <= cfg.steps; ++k) {
        st.step(zero_load);
        const T e = st.energy();
        const T prev = result.series.back().energy;
        const T growth = (e - prev) / std::max(e0, T(1e-30));
        result.max_growth = std::max(result.max_growth, growth);
        if (growth > T(1e-10))
            result.monotone = false;
        result.series.push_back(
            { k, (T(k) + T(0.5)) * dt, e, st.constraint_residual() });
    }
    return result;
}

// --- CSV output ----------------------------------------------------------------

namespace detail {

inline std::string format_sci(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2e", v);
    return buf;
}

inline std::string format_rate(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline std::string format_plain(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

} // namespace detail

template<typename T>
std::string render_table(const std::vector<ConvergenceRow<T>>& rows)
{
    std::ostringstream out;
    out << "h,e_p,r_p,e_r,r_r,e_accel,r_accel\n";
    for (const auto& row : rows) {
        out << detail::format_plain(double(row.h)) << ','
            << detail::format_sci(double(row.e_p)) << ','
            << (row.has_rates ? detail::format_rate(double(row.r_p)) : "") << ','
            << detail::format_sci(double(row.e_r)) << ','
            << (row.has_rates ? detail::format_rate(double(row.r_r)) : "") << ','
            << detail::format_sci(double(row.e_accel)) << ','
            << (row.has_rates ? detail::format_rate(double(row.r_accel)) : "")
            << '\n';
    }
    return out.str();
}

template<typename T>
std::string render_energy(const std::vector<EnergySample<T>>& series)
{
    std::ostringstream out;
    out << "step,time,energy,constraint_residual\n";
    for (const auto& s : series) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%d,%.10g,%.12e,%.3e\n", s.step,
                      double(s.time), double(s.energy),
                      double(s.constraint_residual));
        out << buf;
    }
    return out.str();
}

inline void write_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open output file " + path);
    out << content;
    if (!out)
        throw std::runtime_error("failed writing " + path);
}

// inserts a suffix before the extension: table.csv -> table_low.csv
inline std::string suffixed_path(const std::string& path, const std::string& tag)
{
    const auto slash = path.find_last_of('/');
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return path + "_" + tag;
    return path.substr(0, dot) + "_" + tag + path.substr(dot);
}

} // namespace zener
