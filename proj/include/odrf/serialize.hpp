#pragma once
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "odrf/data.hpp"
#include "odrf/errors.hpp"
#include "odrf/forest.hpp"
#include "odrf/tree.hpp"

namespace odrf {

using json = nlohmann::ordered_json;

inline constexpr int kModelFormatVersion = 1;

// ---------------------------------------------------------------------------
// JSON payloads
// ---------------------------------------------------------------------------

inline json plane_to_json(const SplitPlane &pl) {
    return json{{"subset", pl.subset}, {"theta", pl.theta}, {"s", pl.s}};
}

inline SplitPlane plane_from_json(const json &j) {
    SplitPlane pl;
    pl.subset = j.at("subset").get<std::vector<int>>();
    pl.theta = j.at("theta").get<std::vector<double>>();
    pl.s = j.at("s").get<double>();
    return pl;
}

inline json tree_to_json(const ObliqueTree &tree) {
    json nodes = json::array();
    for (const auto &nd : tree.nodes) {
        json n{{"mean", nd.mean},   {"sse", nd.sse},
               {"count", nd.count}, {"layer", nd.layer},
               {"left", nd.left},   {"right", nd.right},
               {"split_order", nd.split_order}};
        if (!nd.is_leaf()) n["plane"] = plane_to_json(nd.plane);
        nodes.push_back(std::move(n));
    }
    json trace = json::array();
    for (const auto &ev : tree.trace)
        trace.push_back(json{{"node", ev.node_id},
                             {"plane", plane_to_json(ev.plane)},
                             {"gain", ev.gain},
                             {"n_node", ev.n_node},
                             {"sse_after", ev.sse_after}});
    return json{{"task", task_name(tree.task)},
                {"n_train", tree.n_train},
                {"p", tree.p},
                {"root_sse", tree.root_sse},
                {"nodes", std::move(nodes)},
                {"trace", std::move(trace)}};
}

inline ObliqueTree tree_from_json(const json &j) {
    ObliqueTree tree;
    tree.task = j.at("task").get<std::string>() == "classification"
                    ? Task::classification
                    : Task::regression;
    tree.n_train = j.at("n_train").get<int>();
    tree.p = j.at("p").get<int>();
    tree.root_sse = j.at("root_sse").get<double>();
    for (const auto &n : j.at("nodes")) {
        TreeNode nd;
        nd.mean = n.at("mean").get<double>();
        nd.sse = n.at("sse").get<double>();
        nd.count = n.at("count").get<int>();
        nd.layer = n.at("layer").get<int>();
        nd.left = n.at("left").get<int>();
        nd.right = n.at("right").get<int>();
        nd.split_order = n.at("split_order").get<int>();
        if (n.contains("plane")) nd.plane = plane_from_json(n.at("plane"));
        tree.nodes.push_back(std::move(nd));
    }
    for (const auto &e : j.at("trace")) {
        SplitEvent ev;
        ev.node_id = e.at("node").get<int>();
        ev.plane = plane_from_json(e.at("plane"));
        ev.gain = e.at("gain").get<double>();
        ev.n_node = e.at("n_node").get<int>();
        ev.sse_after = e.at("sse_after").get<double>();
        tree.trace.push_back(std::move(ev));
    }
    return tree;
}

inline json scaler_to_json(const ScalingTransform &t) {
    return json{{"mins", t.mins}, {"ranges", t.ranges}};
}

inline ScalingTransform scaler_from_json(const json &j) {
    ScalingTransform t;
    t.mins = j.at("mins").get<std::vector<double>>();
    t.ranges = j.at("ranges").get<std::vector<double>>();
    return t;
}

// ---------------------------------------------------------------------------
// Model document: header + scaler + parameter echo + tree payloads
// ---------------------------------------------------------------------------

struct ModelDocument {
    Task task = Task::regression;
    std::string kind; // "tree" | "forest"
    ScalingTransform scaler;
    std::vector<std::string> feature_names;
    std::string target_name;
    json params; // full config echo, informational
    std::vector<ObliqueTree> trees;
};

inline json model_to_json(const ModelDocument &doc) {
    json trees = json::array();
    for (const auto &t : doc.trees) trees.push_back(tree_to_json(t));
    return json{{"format_version", kModelFormatVersion},
                {"task", task_name(doc.task)},
                {"kind", doc.kind},
                {"feature_names", doc.feature_names},
                {"target_name", doc.target_name},
                {"scaler", scaler_to_json(doc.scaler)},
                {"params", doc.params},
                {"trees", std::move(trees)}};
}

inline ModelDocument model_from_json(const json &j) {
    if (!j.contains("format_version") ||
        j.at("format_version").get<int>() != kModelFormatVersion)
        throw Error(ErrorCode::VersionMismatch, "unsupported model format version");
    ModelDocument doc;
    doc.task = j.at("task").get<std::string>() == "classification"
                   ? Task::classification
                   : Task::regression;
    doc.kind = j.at("kind").get<std::string>();
    doc.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    doc.target_name = j.at("target_name").get<std::string>();
    doc.scaler = scaler_from_json(j.at("scaler"));
    doc.params = j.at("params");
    for (const auto &t : j.at("trees")) doc.trees.push_back(tree_from_json(t));
    return doc;
}

inline void save_model(const ModelDocument &doc, const std::string &path) {
    std::ofstream out(path);
    if (!out)
        throw Error(ErrorCode::SchemaMismatch, "cannot write model file: " + path);
    out << model_to_json(doc).dump(2) << "\n";
}

inline ModelDocument load_model(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::SchemaMismatch, "cannot open model file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception &e) {
        throw Error(ErrorCode::SchemaMismatch,
                    std::string("model file is not valid JSON: ") + e.what());
    }
    return model_from_json(j);
}

} // namespace odrf
