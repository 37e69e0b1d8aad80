#include "drrt/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "drrt/numeric.hpp"
#include "drrt/rng.hpp"

namespace drrt {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void bail(const std::string& context, const std::string& what) {
    throw std::invalid_argument("scenario: " + context + ": " + what);
}

const json& field(const json& obj, const std::string& context, const std::string& key) {
    const auto it = obj.find(key);
    if (it == obj.end()) bail(context, "missing required field '" + key + "'");
    return *it;
}

void reject_unknown(const json& obj, const std::string& context,
                    const std::set<std::string>& allowed) {
    if (!obj.is_object()) bail(context, "expected an object");
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (allowed.find(key) == allowed.end()) bail(context, "unknown field '" + key + "'");
    }
}

double number(const json& v, const std::string& context) {
    if (!v.is_number()) bail(context, "expected a number");
    return v.get<double>();
}

int integer(const json& v, const std::string& context) {
    if (!v.is_number_integer()) bail(context, "expected an integer");
    return v.get<int>();
}

Eigen::VectorXd parse_vector(const json& v, const std::string& context, Eigen::Index size = -1) {
    if (!v.is_array()) bail(context, "expected a list of numbers");
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = number(v[i], context);
    if (size >= 0 && out.size() != size)
        bail(context, "expected " + std::to_string(size) + " entries, got " +
                          std::to_string(out.size()));
    return out;
}

// Row-major flat list; a bare number is shorthand for that multiple of I.
Eigen::MatrixXd parse_matrix(const json& v, const std::string& context, Eigen::Index rows,
                             Eigen::Index cols, bool scalar_shorthand = false) {
    if (scalar_shorthand && v.is_number()) {
        if (rows != cols) bail(context, "scalar shorthand requires a square matrix");
        return v.get<double>() * Eigen::MatrixXd::Identity(rows, cols);
    }
    if (!v.is_array()) bail(context, "expected a row-major list of numbers");
    if (static_cast<Eigen::Index>(v.size()) != rows * cols)
        bail(context, "expected " + std::to_string(rows * cols) + " entries (" +
                          std::to_string(rows) + "×" + std::to_string(cols) + " row-major), got " +
                          std::to_string(v.size()));
    Eigen::MatrixXd out(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c)
            out(r, c) = number(v[static_cast<std::size_t>(r * cols + c)], context);
    }
    return out;
}

struct BoxSpec {
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;
};

BoxSpec parse_box(const json& v, const std::string& context) {
    reject_unknown(v, context, {"min", "max"});
    BoxSpec box;
    box.lo = parse_vector(field(v, context, "min"), context + ".min");
    box.hi = parse_vector(field(v, context, "max"), context + ".max", box.lo.size());
    for (Eigen::Index i = 0; i < box.lo.size(); ++i) {
        if (!(box.lo[i] < box.hi[i])) bail(context, "requires min < max per coordinate");
    }
    return box;
}

Polytope parse_halfspaces(const json& v, const std::string& context) {
    if (!v.is_array() || v.empty()) bail(context, "expected a nonempty list of halfspaces");
    Polytope p;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string ctx = context + "[" + std::to_string(i) + "]";
        reject_unknown(v[i], ctx, {"a", "b"});
        Halfspace h;
        h.a = parse_vector(field(v[i], ctx, "a"), ctx + ".a");
        h.b = number(field(v[i], ctx, "b"), ctx + ".b");
        p.halfspaces.push_back(std::move(h));
    }
    p.validate();
    return p;
}

Polytope parse_region(const json& obj, const std::string& context, const std::string& box_key,
                      const std::string& halfspace_key) {
    const bool has_box = obj.contains(box_key);
    const bool has_hs = obj.contains(halfspace_key);
    if (has_box == has_hs)
        bail(context, "exactly one of '" + box_key + "' or '" + halfspace_key + "' is required");
    if (has_box) {
        const BoxSpec box = parse_box(obj[box_key], context + "." + box_key);
        return Polytope::box(box.lo, box.hi);
    }
    return parse_halfspaces(obj[halfspace_key], context + "." + halfspace_key);
}

json vector_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
    }
    return out;
}

json halfspaces_to_json(const Polytope& p) {
    json out = json::array();
    for (const Halfspace& h : p.halfspaces) {
        json row;
        row["a"] = vector_to_json(h.a);
        row["b"] = h.b;
        out.push_back(std::move(row));
    }
    return out;
}

// Recovers {min, max} from a polytope laid out by Polytope::box (the only way
// an input set enters a scenario).
json box_to_json(const Polytope& p) {
    const int d = static_cast<int>(p.halfspaces.size()) / 2;
    Eigen::VectorXd lo(d);
    Eigen::VectorXd hi(d);
    for (int i = 0; i < d; ++i) {
        lo[i] = -p.halfspaces[static_cast<std::size_t>(2 * i)].b;
        hi[i] = p.halfspaces[static_cast<std::size_t>(2 * i + 1)].b;
    }
    json out;
    out["min"] = vector_to_json(lo);
    out["max"] = vector_to_json(hi);
    return out;
}

}  // namespace

Scenario load_scenario(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("scenario: not valid JSON: ") + e.what());
    }
    reject_unknown(doc, "document", {"system", "environment", "obstacles", "planner"});

    Scenario s;

    // --- system ---
    {
        const json& sys = field(doc, "document", "system");
        reject_unknown(sys, "system", {"A", "B", "dt", "Sigma_w", "Sigma_x0", "x0_mean"});
        s.system.x0_mean = parse_vector(field(sys, "system", "x0_mean"), "system.x0_mean");
        const Eigen::Index n = s.system.x0_mean.size();
        s.system.A = parse_matrix(field(sys, "system", "A"), "system.A", n, n);
        const json& bj = field(sys, "system", "B");
        if (!bj.is_array() || bj.size() % static_cast<std::size_t>(n) != 0)
            bail("system.B", "length must be a multiple of the state dimension");
        const Eigen::Index m = static_cast<Eigen::Index>(bj.size()) / n;
        s.system.B = parse_matrix(bj, "system.B", n, m);
        s.system.dt = number(field(sys, "system", "dt"), "system.dt");
        s.system.sigma_w = parse_matrix(field(sys, "system", "Sigma_w"), "system.Sigma_w", n, n);
        s.system.sigma_x0 =
            parse_matrix(field(sys, "system", "Sigma_x0"), "system.Sigma_x0", n, n);
        try {
            s.system.validate();
        } catch (const std::invalid_argument& e) {
            bail("system", e.what());
        }
    }

    // --- environment ---
    {
        const json& env = field(doc, "document", "environment");
        reject_unknown(env, "environment",
                       {"workspace_box", "workspace_halfspaces", "goal_box", "goal_halfspaces",
                        "env_probabilistic", "sample_velocity", "velocity_box", "input_box"});
        s.env.workspace = parse_region(env, "environment", "workspace_box", "workspace_halfspaces");
        s.env.goal = parse_region(env, "environment", "goal_box", "goal_halfspaces");
        if (env.contains("env_probabilistic")) {
            if (!env["env_probabilistic"].is_boolean())
                bail("environment.env_probabilistic", "expected a boolean");
            s.env.env_probabilistic = env["env_probabilistic"].get<bool>();
        }
        if (env.contains("sample_velocity")) {
            if (!env["sample_velocity"].is_boolean())
                bail("environment.sample_velocity", "expected a boolean");
            s.env.sample_velocity = env["sample_velocity"].get<bool>();
        }
        if (s.env.sample_velocity != env.contains("velocity_box"))
            bail("environment", "velocity_box is required iff sample_velocity is true");
        if (env.contains("velocity_box")) {
            const BoxSpec box = parse_box(env["velocity_box"], "environment.velocity_box");
            s.env.velocity_lo = box.lo;
            s.env.velocity_hi = box.hi;
        }
        if (env.contains("input_box")) {
            const BoxSpec box = parse_box(env["input_box"], "environment.input_box");
            s.env.input_set = Polytope::box(box.lo, box.hi);
        }
    }

    // --- obstacles ---
    {
        const json& obstacles = field(doc, "document", "obstacles");
        if (!obstacles.is_array()) bail("obstacles", "expected a list");
        const int d = s.env.position_dim();
        for (std::size_t i = 0; i < obstacles.size(); ++i) {
            const std::string ctx = "obstacles[" + std::to_string(i) + "]";
            const json& oj = obstacles[i];
            reject_unknown(oj, ctx, {"rect", "halfspaces", "drift", "schedule", "location_cov"});
            Obstacle obs;
            obs.shape = parse_region(oj, ctx, "rect", "halfspaces");
            if (oj.contains("drift"))
                obs.drift = parse_vector(oj["drift"], ctx + ".drift", d);
            if (oj.contains("schedule")) {
                const json& sched = oj["schedule"];
                if (!sched.is_array() || sched.empty())
                    bail(ctx + ".schedule", "expected a nonempty list of translations");
                for (std::size_t k = 0; k < sched.size(); ++k)
                    obs.schedule.push_back(parse_vector(sched[k], ctx + ".schedule", d));
            }
            if (oj.contains("location_cov"))
                obs.location_cov = parse_matrix(oj["location_cov"], ctx + ".location_cov", d, d);
            try {
                obs.validate(d);
            } catch (const std::invalid_argument& e) {
                bail(ctx, e.what());
            }
            s.env.obstacles.push_back(std::move(obs));
        }
    }

    // --- planner ---
    {
        const json& pl = field(doc, "document", "planner");
        reject_unknown(pl, "planner",
                       {"Delta", "T", "T_steer", "M", "theta_J", "theta_res", "samples", "Q", "R",
                        "inflation_radius", "allocation"});
        const Eigen::Index n = s.system.state_dim();
        const Eigen::Index m = s.system.input_dim();
        s.params.delta = number(field(pl, "planner", "Delta"), "planner.Delta");
        s.params.total_horizon = integer(field(pl, "planner", "T"), "planner.T");
        s.params.steer_horizon = integer(field(pl, "planner", "T_steer"), "planner.T_steer");
        s.params.samples = integer(field(pl, "planner", "samples"), "planner.samples");
        s.params.Q = parse_matrix(field(pl, "planner", "Q"), "planner.Q", n, n, true);
        s.params.R = parse_matrix(field(pl, "planner", "R"), "planner.R", m, m, true);
        if (pl.contains("M")) s.params.near_count = integer(pl["M"], "planner.M");
        if (pl.contains("theta_J")) s.params.theta_J = number(pl["theta_J"], "planner.theta_J");
        if (pl.contains("theta_res"))
            s.params.theta_res = number(pl["theta_res"], "planner.theta_res");
        if (pl.contains("inflation_radius"))
            s.params.inflation_radius = number(pl["inflation_radius"], "planner.inflation_radius");
        if (pl.contains("allocation")) {
            if (!pl["allocation"].is_string()) bail("planner.allocation", "expected a string");
            s.params.allocation = allocation_from_string(pl["allocation"].get<std::string>());
        }
    }

    try {
        s.env.derive_sampling_bounds();
        s.env.validate();
        s.params.validate(s.system.state_dim(), s.system.input_dim());
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string("scenario: ") + e.what());
    }
    if (s.env.position_dim() > s.system.state_dim())
        throw std::invalid_argument("scenario: workspace dimension exceeds the state dimension");
    return s;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("scenario: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_scenario(buf.str());
}

std::string serialize_scenario(const Scenario& s) {
    json doc;

    json sys;
    sys["A"] = matrix_to_json(s.system.A);
    sys["B"] = matrix_to_json(s.system.B);
    sys["dt"] = s.system.dt;
    sys["Sigma_w"] = matrix_to_json(s.system.sigma_w);
    sys["Sigma_x0"] = matrix_to_json(s.system.sigma_x0);
    sys["x0_mean"] = vector_to_json(s.system.x0_mean);
    doc["system"] = std::move(sys);

    json env;
    env["workspace_halfspaces"] = halfspaces_to_json(s.env.workspace);
    env["goal_halfspaces"] = halfspaces_to_json(s.env.goal);
    env["env_probabilistic"] = s.env.env_probabilistic;
    if (s.env.sample_velocity) {
        env["sample_velocity"] = true;
        json vb;
        vb["min"] = vector_to_json(s.env.velocity_lo);
        vb["max"] = vector_to_json(s.env.velocity_hi);
        env["velocity_box"] = std::move(vb);
    }
    if (!s.env.input_set.halfspaces.empty()) env["input_box"] = box_to_json(s.env.input_set);
    doc["environment"] = std::move(env);

    json obstacles = json::array();
    for (const Obstacle& obs : s.env.obstacles) {
        json oj;
        oj["halfspaces"] = halfspaces_to_json(obs.shape);
        if (obs.drift.size() > 0) oj["drift"] = vector_to_json(obs.drift);
        if (!obs.schedule.empty()) {
            json sched = json::array();
            for (const auto& c : obs.schedule) sched.push_back(vector_to_json(c));
            oj["schedule"] = std::move(sched);
        }
        if (obs.location_cov.size() > 0) oj["location_cov"] = matrix_to_json(obs.location_cov);
        obstacles.push_back(std::move(oj));
    }
    doc["obstacles"] = std::move(obstacles);

    json pl;
    pl["Delta"] = s.params.delta;
    pl["T"] = s.params.total_horizon;
    pl["T_steer"] = s.params.steer_horizon;
    pl["M"] = s.params.near_count;
    pl["theta_J"] = s.params.theta_J;
    pl["theta_res"] = s.params.theta_res;
    pl["samples"] = s.params.samples;
    pl["Q"] = matrix_to_json(s.params.Q);
    pl["R"] = matrix_to_json(s.params.R);
    pl["inflation_radius"] = s.params.inflation_radius;
    pl["allocation"] = to_string(s.params.allocation);
    doc["planner"] = std::move(pl);

    return doc.dump(2) + "\n";
}

Scenario generate_scenario(int n_obstacles, std::uint64_t seed, double start_clearance) {
    if (n_obstacles < 0) throw std::invalid_argument("obstacle count must be >= 0");
    if (start_clearance < 0.0) throw std::invalid_argument("start clearance must be >= 0");

    Scenario s;
    const double dt = 0.1;
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(4, 4);
    A(0, 2) = dt;
    A(1, 3) = dt;
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(4, 2);
    B(0, 0) = 0.5 * dt * dt;
    B(1, 1) = 0.5 * dt * dt;
    B(2, 0) = dt;
    B(3, 1) = dt;
    Eigen::MatrixXd sigma_w = Eigen::MatrixXd::Zero(4, 4);
    sigma_w(2, 2) = 2e-3;
    sigma_w(3, 3) = 2e-3;
    sigma_w(2, 3) = 1e-3;
    sigma_w(3, 2) = 1e-3;
    Eigen::MatrixXd sigma_x0 = Eigen::MatrixXd::Zero(4, 4);
    sigma_x0(0, 0) = 1e-3;
    sigma_x0(1, 1) = 1e-3;

    s.system = StochasticLinearSystem{A, B, sigma_w, Eigen::VectorXd::Zero(4), sigma_x0, dt};

    const double extent = 50.0;
    s.env.workspace = Polytope::box(Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(extent, extent));
    s.env.goal = Polytope::box(Eigen::Vector2d(45.0, 45.0), Eigen::Vector2d(extent, extent));
    s.env.env_probabilistic = false;

    std::mt19937_64 rng = make_stream(seed, 0);
    const Eigen::Vector2d start(0.0, 0.0);
    while (static_cast<int>(s.env.obstacles.size()) < n_obstacles) {
        const double w = uniform(rng, 3.0, 8.0);
        const double h = uniform(rng, 3.0, 8.0);
        const double x = uniform(rng, 0.0, extent - w);
        const double y = uniform(rng, 0.0, extent - h);
        const double dx = std::max({x - start.x(), start.x() - (x + w), 0.0});
        const double dy = std::max({y - start.y(), start.y() - (y + h), 0.0});
        if (std::hypot(dx, dy) < start_clearance) continue;
        Obstacle obs;
        obs.shape = Polytope::box(Eigen::Vector2d(x, y), Eigen::Vector2d(x + w, y + h));
        s.env.obstacles.push_back(std::move(obs));
    }
    s.env.derive_sampling_bounds();

    s.params.delta = 0.1;
    s.params.total_horizon = 1000;
    s.params.steer_horizon = 10;
    s.params.near_count = 5;
    s.params.theta_J = 0.5;
    s.params.theta_res = 0.5;
    s.params.samples = 1000;
    s.params.Q = 40.0 * Eigen::MatrixXd::Identity(4, 4);
    s.params.R = 0.1 * Eigen::MatrixXd::Identity(2, 2);
    s.params.inflation_radius = 0.0;
    s.params.allocation = Allocation::Era;
    return s;
}

}  // namespace drrt
