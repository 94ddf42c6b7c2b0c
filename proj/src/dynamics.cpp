#include "xtune/dynamics.hpp"

#include <cmath>

namespace xtune {

void validate(const SingleTrackParams& p) {
    auto pos = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!pos(p.M) || !pos(p.I_z) || !pos(p.L_f) || !pos(p.L_r) || !pos(p.C_af) ||
        !pos(p.C_ar) || !pos(p.F_max) || !pos(p.v_eps))
        throw InvalidInputError("single-track params: non-positive entry");
    if (p.drive_split < 0.0 || p.drive_split > 1.0)
        throw InvalidInputError("single-track params: drive_split outside [0,1]");
    if (p.c_r0 < 0.0 || p.c_r2 < 0.0)
        throw InvalidInputError("single-track params: negative resistance");
}

void validate(const PlantConfig& cfg) {
    validate(cfg.nominal);
    if (cfg.tau_delta < 0.0 || cfg.tau_tr < 0.0)
        throw InvalidInputError("plant: actuator time constants must be >= 0");
    const RandomizationStd& r = cfg.randomization;
    for (double v : {r.M, r.I_z, r.C_af, r.C_ar, r.F_max})
        if (v < 0.0) throw InvalidInputError("plant: randomization std must be >= 0");
    if ((cfg.process_noise_std.array() < 0.0).any())
        throw InvalidInputError("plant: process noise std must be >= 0");
}

namespace {

struct Slip {
    double front;
    double rear;
};

Slip slip_angles(double vx, double vy, double r, double delta,
                 const SingleTrackParams& p) {
    double v_lon = std::max(vx, p.v_eps);
    return {delta - std::atan((vy + p.L_f * r) / v_lon),
            -std::atan((vy - p.L_r * r) / v_lon)};
}

double rolling_resistance(double vx, const SingleTrackParams& p) {
    return p.c_r0 + p.c_r2 * vx * vx;
}

// Body-frame accelerations shared by the prediction model and the plant.
void body_derivatives(double vx, double vy, double r, double delta,
                      const TireForces& fy, const AxleForces& fx,
                      const SingleTrackParams& p, double& dvx, double& dvy,
                      double& dr) {
    double f_res = rolling_resistance(vx, p);
    double cd = std::cos(delta), sd = std::sin(delta);
    dvx = (fx.F_xf * cd + fx.F_xr - fy.F_yf * sd - f_res + p.M * r * vy) / p.M;
    dvy = (fx.F_xf * sd + fy.F_yr + fy.F_yf * cd - p.M * r * vx) / p.M;
    dr = (p.L_f * (fy.F_yf * cd + fx.F_xf * sd) - p.L_r * fy.F_yr) / p.I_z;
}

}  // namespace

TireForces linear_tire_forces(const VehicleState& x, double delta,
                              const SingleTrackParams& p) {
    Slip a = slip_angles(x.vx, x.vy, x.r, delta, p);
    return {p.C_af * a.front, p.C_ar * a.rear};
}

AxleForces throttle_to_forces(double tr, const SingleTrackParams& p) {
    double fx = tr * p.F_max;
    return {p.drive_split * fx, (1.0 - p.drive_split) * fx};
}

VehicleState single_track_derivatives(const VehicleState& x, const ControlInput& u,
                                      const SingleTrackParams& p, double kappa_c) {
    double proj = 1.0 - kappa_c * x.w;
    if (std::abs(proj) < 1e-9)
        throw NumericsError("curvilinear projection singular (kappa*w -> 1)");

    TireForces fy = linear_tire_forces(x, u.delta, p);
    AxleForces fx = throttle_to_forces(u.tr, p);

    VehicleState d;
    body_derivatives(x.vx, x.vy, x.r, u.delta, fy, fx, p, d.vx, d.vy, d.r);
    double ct = std::cos(x.theta), st = std::sin(x.theta);
    d.s = (x.vx * ct - x.vy * st) / proj;
    d.w = x.vx * st + x.vy * ct;
    d.theta = x.r - kappa_c * d.s;
    return d;
}

PlantState plant_step(const PlantState& ps, const ControlInput& u_cmd, double dt,
                      const PlantConfig& cfg, const SingleTrackParams& params,
                      Rng& rng) {
    Vector8d z = ps.to_vector();
    // tau == 0 means an ideal actuator: snap to the command, zero derivative.
    if (cfg.tau_delta <= 0.0) z[6] = u_cmd.delta;
    if (cfg.tau_tr <= 0.0) z[7] = u_cmd.tr;

    auto rhs = [&](const Vector8d& v, const ControlInput& cmd) -> Vector8d {
        double psi = v[2], vx = v[3], vy = v[4], r = v[5];
        double delta = v[6], tr = v[7];

        Slip a = slip_angles(vx, vy, r, delta, params);
        TireForces fy;
        if (cfg.tire_model == TireModel::kLinear) {
            fy = {params.C_af * a.front, params.C_ar * a.rear};
        } else {
            fy = {cfg.tire_front.force(a.front), cfg.tire_rear.force(a.rear)};
        }
        AxleForces fx = throttle_to_forces(tr, params);

        Vector8d d;
        body_derivatives(vx, vy, r, delta, fy, fx, params, d[3], d[4], d[5]);
        d[0] = vx * std::cos(psi) - vy * std::sin(psi);
        d[1] = vx * std::sin(psi) + vy * std::cos(psi);
        d[2] = r;
        d[6] = cfg.tau_delta > 0.0 ? (cmd.delta - delta) / cfg.tau_delta : 0.0;
        d[7] = cfg.tau_tr > 0.0 ? (cmd.tr - tr) / cfg.tau_tr : 0.0;
        return d;
    };

    Vector8d next = rk4_step(rhs, z, u_cmd, dt);

    if ((cfg.process_noise_std.array() > 0.0).any()) {
        std::normal_distribution<double> n01(0.0, 1.0);
        for (int i = 0; i < 6; ++i) next[i] += cfg.process_noise_std[i] * n01(rng);
    }
    next[2] = wrap_angle(next[2]);
    next[3] = std::max(next[3], 0.0);  // forward motion only
    if (!next.allFinite()) throw NumericsError("plant_step: state diverged");
    return PlantState::from_vector(next);
}

SingleTrackParams randomize_plant(const PlantConfig& cfg, Rng& rng) {
    auto factor = [&rng](double std) {
        if (std <= 0.0) return 1.0;
        std::normal_distribution<double> n(0.0, std);
        double eps;
        do {
            eps = n(rng);
        } while (std::abs(eps) > 3.0 * std);
        return 1.0 + eps;
    };
    SingleTrackParams p = cfg.nominal;
    const RandomizationStd& r = cfg.randomization;
    p.M *= factor(r.M);
    p.I_z *= factor(r.I_z);
    p.C_af *= factor(r.C_af);
    p.C_ar *= factor(r.C_ar);
    p.F_max *= factor(r.F_max);
    validate(p);
    return p;
}

}  // namespace xtune
