#pragma once

#include <Eigen/Dense>

#include "xtune/common.hpp"
#include "xtune/path.hpp"

namespace xtune {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Vector8d = Eigen::Matrix<double, 8, 1>;

/// Single-track model parameters. Defaults are the nominal prediction-model
/// configuration; the rolling/aero resistance terms default to zero there,
/// the surrogate plant enables them through PlantConfig.
struct SingleTrackParams {
    double M = 1500.0;     ///< mass [kg]
    double I_z = 2500.0;   ///< yaw inertia [kg m^2]
    double L_f = 1.2;      ///< CoG to front axle [m]
    double L_r = 1.4;      ///< CoG to rear axle [m]
    double C_af = 1.0e5;   ///< front cornering stiffness [N/rad]
    double C_ar = 1.0e5;   ///< rear cornering stiffness [N/rad]
    double F_max = 6000.0; ///< peak drive force per unit throttle [N]
    double drive_split = 0.5;  ///< fraction of F_x on the front axle
    double c_r0 = 0.0;     ///< rolling resistance [N]
    double c_r2 = 0.0;     ///< aero drag coefficient [N s^2/m^2]
    double v_eps = 0.5;    ///< low-speed slip regularization [m/s]
};

void validate(const SingleTrackParams& p);

/// Curvilinear 6-state: body-frame velocities plus path-attached kinematics.
struct VehicleState {
    double vx = 0.0;
    double vy = 0.0;
    double r = 0.0;
    double s = 0.0;
    double w = 0.0;
    double theta = 0.0;

    Vector6d to_vector() const {
        Vector6d v;
        v << vx, vy, r, s, w, theta;
        return v;
    }
    static VehicleState from_vector(const Vector6d& v) {
        return VehicleState{v[0], v[1], v[2], v[3], v[4], v[5]};
    }
};

struct ControlInput {
    double delta = 0.0;  ///< road-wheel steering angle [rad]
    double tr = 0.0;     ///< normalized throttle/brake in [-1, 1]

    Eigen::Vector2d to_vector() const { return {delta, tr}; }
    static ControlInput from_vector(const Eigen::Vector2d& v) { return {v[0], v[1]}; }
};

struct TireForces {
    double F_yf = 0.0;
    double F_yr = 0.0;
};

struct AxleForces {
    double F_xf = 0.0;
    double F_xr = 0.0;
};

/// Linear tire model: lateral force proportional to slip angle, with the
/// longitudinal speed floored at v_eps in the slip-angle denominators.
TireForces linear_tire_forces(const VehicleState& x, double delta,
                              const SingleTrackParams& p);

/// Drive-force map: total F_x = tr * F_max split between the axles.
AxleForces throttle_to_forces(double tr, const SingleTrackParams& p);

/// Right-hand side of the curvilinear single-track ODEs. Throws
/// NumericsError when kappa_c * w approaches 1 (singular projection).
VehicleState single_track_derivatives(const VehicleState& x, const ControlInput& u,
                                      const SingleTrackParams& p, double kappa_c);

/// Classical 4-stage Runge-Kutta step with zero-order-hold input.
/// f(x, u) must return the state derivative as an Eigen vector type.
template <typename F, typename State, typename Input>
State rk4_step(F&& f, const State& x, const Input& u, double dt) {
    if (!(dt > 0.0)) throw InvalidInputError("rk4_step: dt must be positive");
    State k1 = f(x, u);
    State k2 = f(State(x + (0.5 * dt) * k1), u);
    State k3 = f(State(x + (0.5 * dt) * k2), u);
    State k4 = f(State(x + dt * k3), u);
    State next = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!next.allFinite()) throw NumericsError("rk4_step: state diverged");
    return next;
}

/// One prediction-model step; curvature is re-queried at each RK4 stage
/// evaluation so the step is consistent with the path geometry.
template <typename KappaFn>
Vector6d prediction_step(const Vector6d& x, const ControlInput& u,
                         const SingleTrackParams& p, KappaFn&& kappa_of_s, double dt) {
    auto rhs = [&](const Vector6d& xs, const ControlInput& us) -> Vector6d {
        return single_track_derivatives(VehicleState::from_vector(xs), us, p,
                                        kappa_of_s(xs[3]))
            .to_vector();
    };
    return rk4_step(rhs, x, u, dt);
}

enum class TireModel { kLinear, kNonlinearSaturating };

/// Saturating lateral tire: F_y = D * sin(C * atan(B * alpha)).
struct SaturatingTire {
    double B = 10.0;
    double C = 1.9;
    double D = 8000.0;

    double force(double alpha) const { return D * std::sin(C * std::atan(B * alpha)); }
};

/// Relative (multiplicative) randomization std-devs for the plant.
struct RandomizationStd {
    double M = 0.0;
    double I_z = 0.0;
    double C_af = 0.0;
    double C_ar = 0.0;
    double F_max = 0.0;
};

/// Surrogate high-fidelity plant configuration: nominal physics plus the
/// fidelity upgrades (saturating tires, actuator lag, process noise) and
/// the domain-randomization distributions.
struct PlantConfig {
    SingleTrackParams nominal;
    TireModel tire_model = TireModel::kNonlinearSaturating;
    SaturatingTire tire_front{10.0, 1.9, 7900.0};
    SaturatingTire tire_rear{10.0, 1.9, 6800.0};
    double tau_delta = 0.08;  ///< steering actuator time constant [s]
    double tau_tr = 0.2;      ///< drive actuator time constant [s]
    RandomizationStd randomization;
    Vector6d process_noise_std = Vector6d::Zero();  ///< per (X,Y,psi,vx,vy,r)
};

void validate(const PlantConfig& cfg);

/// Plant state in world coordinates, with first-order actuator states.
struct PlantState {
    CartesianPose cart;
    double vx = 0.0;
    double vy = 0.0;
    double r = 0.0;
    double act_delta = 0.0;
    double act_tr = 0.0;

    Vector8d to_vector() const {
        Vector8d v;
        v << cart.X, cart.Y, cart.psi, vx, vy, r, act_delta, act_tr;
        return v;
    }
    static PlantState from_vector(const Vector8d& v) {
        return PlantState{{v[0], v[1], v[2]}, v[3], v[4], v[5], v[6], v[7]};
    }
};

/// Advances the plant one step: actuator lag toward the commanded input,
/// body dynamics under the configured tire model with `params` (typically a
/// randomized draw), Cartesian kinematics, then additive process noise from
/// the caller's rng. Throws NumericsError on divergence.
PlantState plant_step(const PlantState& ps, const ControlInput& u_cmd, double dt,
                      const PlantConfig& cfg, const SingleTrackParams& params,
                      Rng& rng);

/// Draws a randomized parameter set: each randomized entry is scaled by
/// (1 + eps) with eps ~ N(0, std^2) truncated at +-3 sigma.
SingleTrackParams randomize_plant(const PlantConfig& cfg, Rng& rng);

/// Stacked per-step tracking errors and optimal costs over one update window.
struct PerformanceWindow {
    Eigen::VectorXd v_err;  ///< vx - v_ref per step [m/s]
    Eigen::VectorXd w_dev;  ///< lateral deviation per step [m]
    Eigen::VectorXd j_opt;  ///< NMPC optimal cost per step

    int size() const { return static_cast<int>(v_err.size()); }
    void check_consistent() const {
        if (v_err.size() != w_dev.size() || v_err.size() != j_opt.size())
            throw InvalidInputError("performance window: block size mismatch");
    }
};

}  // namespace xtune
