#include "drrt/tree_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace drrt {

namespace {

using json = nlohmann::ordered_json;

json vec_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

// Matrices flatten row-major; consumers know the shapes from context.
json mat_json(const Eigen::MatrixXd& m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
    }
    return out;
}

Eigen::VectorXd vec_parse(const json& v, const std::string& what) {
    if (!v.is_array()) throw std::invalid_argument("tree dump: " + what + ": expected a list");
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number())
            throw std::invalid_argument("tree dump: " + what + ": expected numbers");
        out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
    }
    return out;
}

Eigen::MatrixXd mat_parse(const json& v, Eigen::Index rows, Eigen::Index cols,
                          const std::string& what) {
    const Eigen::VectorXd flat = vec_parse(v, what);
    if (flat.size() != rows * cols)
        throw std::invalid_argument("tree dump: " + what + ": wrong entry count");
    Eigen::MatrixXd out(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) out(r, c) = flat[r * cols + c];
    }
    return out;
}

const json& want(const json& obj, const char* key, const std::string& what) {
    const auto it = obj.find(key);
    if (it == obj.end())
        throw std::invalid_argument("tree dump: " + what + ": missing field '" + key + "'");
    return *it;
}

}  // namespace

std::string dump_tree_jsonl(const TreeDumpMeta& meta, const std::vector<TreeNode>& nodes) {
    std::ostringstream out;

    json m;
    m["type"] = "meta";
    m["seed"] = meta.seed;
    m["allocation"] = to_string(meta.params.allocation);
    m["Delta"] = meta.params.delta;
    m["T"] = meta.params.total_horizon;
    m["T_steer"] = meta.params.steer_horizon;
    m["M"] = meta.params.near_count;
    m["theta_J"] = meta.params.theta_J;
    m["theta_res"] = meta.params.theta_res;
    m["samples"] = meta.params.samples;
    m["Q"] = mat_json(meta.params.Q);
    m["R"] = mat_json(meta.params.R);
    m["Q_rows"] = meta.params.Q.rows();
    m["R_rows"] = meta.params.R.rows();
    m["inflation_radius"] = meta.params.inflation_radius;
    out << m.dump() << '\n';

    for (const TreeNode& node : nodes) {
        json rec;
        rec["id"] = node.id;
        rec["parent"] = node.parent;
        rec["k"] = node.k_abs;
        rec["mean"] = vec_json(node.state.mean);
        rec["cov"] = mat_json(node.state.cov);
        rec["J"] = node.cost_to_come;
        rec["res"] = node.residual;
        if (node.edge) {
            const EdgeData& e = *node.edge;
            json ej;
            ej["target"] = vec_json(e.target);
            json means = json::array();
            for (const auto& mp : e.mean_path) means.push_back(vec_json(mp));
            ej["means"] = std::move(means);
            json covs = json::array();
            for (const auto& cp : e.cov_path) covs.push_back(mat_json(cp));
            ej["covs"] = std::move(covs);
            ej["delta"] = mat_json(e.ledger.delta);
            ej["delta_rows"] = e.ledger.delta.rows();
            ej["kappa"] = mat_json(e.ledger.kappa);
            ej["kappa_rows"] = e.ledger.kappa.rows();
            ej["dtot"] = e.ledger.cumulative;
            rec["edge"] = std::move(ej);
        }
        out << rec.dump() << '\n';
    }
    return out.str();
}

TreeDump parse_tree_jsonl(const std::string& text) {
    TreeDump dump;
    std::istringstream in(text);
    std::string line;
    bool have_meta = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::parse_error& e) {
            throw std::invalid_argument(std::string("tree dump: malformed line: ") + e.what());
        }
        if (!have_meta) {
            if (!rec.is_object() || rec.value("type", "") != "meta")
                throw std::invalid_argument("tree dump: first record must be the meta record");
            dump.meta.seed = want(rec, "seed", "meta").get<std::uint64_t>();
            PlannerParams& p = dump.meta.params;
            p.allocation = allocation_from_string(want(rec, "allocation", "meta").get<std::string>());
            p.delta = want(rec, "Delta", "meta").get<double>();
            p.total_horizon = want(rec, "T", "meta").get<int>();
            p.steer_horizon = want(rec, "T_steer", "meta").get<int>();
            p.near_count = want(rec, "M", "meta").get<int>();
            p.theta_J = want(rec, "theta_J", "meta").get<double>();
            p.theta_res = want(rec, "theta_res", "meta").get<double>();
            p.samples = want(rec, "samples", "meta").get<int>();
            const Eigen::Index qn = want(rec, "Q_rows", "meta").get<Eigen::Index>();
            const Eigen::Index rn = want(rec, "R_rows", "meta").get<Eigen::Index>();
            p.Q = mat_parse(want(rec, "Q", "meta"), qn, qn, "meta.Q");
            p.R = mat_parse(want(rec, "R", "meta"), rn, rn, "meta.R");
            p.inflation_radius = want(rec, "inflation_radius", "meta").get<double>();
            have_meta = true;
            continue;
        }
        const std::string what = "node record " + std::to_string(dump.nodes.size());
        TreeNode node;
        node.id = want(rec, "id", what).get<int>();
        node.parent = want(rec, "parent", what).get<int>();
        node.k_abs = want(rec, "k", what).get<int>();
        node.state.mean = vec_parse(want(rec, "mean", what), what + ".mean");
        const Eigen::Index n = node.state.mean.size();
        node.state.cov = mat_parse(want(rec, "cov", what), n, n, what + ".cov");
        node.state.k = node.k_abs;
        node.cost_to_come = want(rec, "J", what).get<double>();
        node.residual = want(rec, "res", what).get<double>();
        if (rec.contains("edge")) {
            const json& ej = rec["edge"];
            EdgeData e;
            e.target = vec_parse(want(ej, "target", what), what + ".target");
            const json& means = want(ej, "means", what);
            const json& covs = want(ej, "covs", what);
            if (!means.is_array() || !covs.is_array() || means.size() != covs.size() ||
                means.size() < 2)
                throw std::invalid_argument("tree dump: " + what + ": malformed edge paths");
            for (std::size_t i = 0; i < means.size(); ++i) {
                e.mean_path.push_back(vec_parse(means[i], what + ".means"));
                e.cov_path.push_back(mat_parse(covs[i], n, n, what + ".covs"));
            }
            const int steps = e.steps();
            const Eigen::Index dr = want(ej, "delta_rows", what).get<Eigen::Index>();
            const Eigen::Index kr = want(ej, "kappa_rows", what).get<Eigen::Index>();
            e.ledger.delta = mat_parse(want(ej, "delta", what), dr, steps, what + ".delta");
            e.ledger.kappa = mat_parse(want(ej, "kappa", what), kr, steps, what + ".kappa");
            const Eigen::VectorXd dtot = vec_parse(want(ej, "dtot", what), what + ".dtot");
            e.ledger.cumulative.assign(dtot.data(), dtot.data() + dtot.size());
            node.edge = std::move(e);
        }
        dump.nodes.push_back(std::move(node));
    }
    if (!have_meta) throw std::invalid_argument("tree dump: empty or missing meta record");
    if (dump.nodes.empty()) throw std::invalid_argument("tree dump: no node records");
    return dump;
}

TreeDump parse_tree_jsonl_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("tree dump: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_tree_jsonl(buf.str());
}

}  // namespace drrt
