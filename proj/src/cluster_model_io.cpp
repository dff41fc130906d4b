#include <fstream>

#include "surveyclust/clustering.hpp"
#include "surveyclust/error.hpp"

namespace surveyclust {

std::string to_string(Method method) {
    switch (method) {
        case Method::KMeans: return "kmeans";
        case Method::KModes: return "kmodes";
        case Method::HclustComplete: return "hclust-complete";
        case Method::HclustSingle: return "hclust-single";
        case Method::HclustAverage: return "hclust-average";
    }
    return "unknown";
}

std::string to_string(Linkage linkage) {
    switch (linkage) {
        case Linkage::Complete: return "complete";
        case Linkage::Single: return "single";
        case Linkage::Average: return "average";
    }
    return "unknown";
}

std::string to_string(Metric metric) { return metric == Metric::Euclidean ? "euclidean" : "simple-matching"; }

Method parse_method(const std::string& text) {
    for (Method m : {Method::KMeans, Method::KModes, Method::HclustComplete, Method::HclustSingle,
                     Method::HclustAverage}) {
        if (to_string(m) == text) return m;
    }
    throw ConfigError("unknown clustering method '" + text +
                      "' (expected kmeans, kmodes, hclust-complete, hclust-single or hclust-average)");
}

Metric parse_metric(const std::string& text) {
    if (text == "euclidean") return Metric::Euclidean;
    if (text == "simple-matching") return Metric::SimpleMatching;
    throw ConfigError("unknown metric '" + text + "' (expected euclidean or simple-matching)");
}

bool is_hierarchical(Method method) {
    return method == Method::HclustComplete || method == Method::HclustSingle || method == Method::HclustAverage;
}

Linkage linkage_of(Method method) {
    switch (method) {
        case Method::HclustSingle: return Linkage::Single;
        case Method::HclustAverage: return Linkage::Average;
        default: return Linkage::Complete;
    }
}

ClusterModel model_from_dendrogram(const DataMatrix& data, const Dendrogram& dendrogram,
                                   const ClusterRequest& request) {
    ClusterModel model;
    model.method = request.method;
    model.k_requested = request.k;
    model.k = request.k;
    model.respondent_ids = data.respondent_ids();
    model.question_ids = data.question_ids();
    model.assignments = cut_tree(dendrogram, request.k);
    model.dendrogram = dendrogram;
    model.seed = request.seed;
    model.standardized = request.standardize;
    model.metric = dendrogram.metric;
    model.iterations = dendrogram.merges.size();
    return model;
}

ClusterModel fit(const DataMatrix& data, const ClusterRequest& request) {
    switch (request.method) {
        case Method::KMeans: {
            KMeansOptions options{request.k, request.seed, request.max_iter ? request.max_iter : 300,
                                  request.standardize};
            return kmeans(data, options);
        }
        case Method::KModes: {
            KModesOptions options{request.k, request.seed, request.max_iter ? request.max_iter : 100,
                                  request.kmodes_init};
            return kmodes(data, options);
        }
        default: break;
    }
    if (request.k < 1 || request.k > data.rows()) {
        throw InputError("hclust: k = " + std::to_string(request.k) + " must lie in [1, " +
                         std::to_string(data.rows()) + "]");
    }
    const Dendrogram tree = hclust(data, linkage_of(request.method), request.metric, request.standardize);
    return model_from_dendrogram(data, tree, request);
}

nlohmann::json cluster_model_to_json(const ClusterModel& model) {
    nlohmann::json j;
    j["format"] = "surveyclust-model/1";
    j["method"] = to_string(model.method);
    j["k_requested"] = model.k_requested;
    j["k"] = model.k;
    j["seed"] = model.seed;
    j["standardized"] = model.standardized;
    j["metric"] = to_string(model.metric);
    j["iterations"] = model.iterations;
    j["converged"] = model.converged;
    j["objective"] = model.objective ? nlohmann::json(*model.objective) : nlohmann::json(nullptr);
    j["objective_history"] = model.objective_history;
    j["question_ids"] = model.question_ids;
    j["respondent_ids"] = model.respondent_ids;
    j["assignments"] = model.assignments;
    j["cluster_sizes"] = model.cluster_sizes();
    j["centers"] = model.centers;
    j["modes"] = model.modes;
    j["warnings"] = model.warnings;
    if (model.dendrogram) {
        nlohmann::json merges = nlohmann::json::array();
        for (const auto& m : model.dendrogram->merges) merges.push_back({m.left, m.right, m.height, m.size});
        j["dendrogram"] = {{"leaves", model.dendrogram->leaves},
                           {"linkage", to_string(model.dendrogram->linkage)},
                           {"metric", to_string(model.dendrogram->metric)},
                           {"merges", merges}};
    } else {
        j["dendrogram"] = nullptr;
    }
    return j;
}

ClusterModel cluster_model_from_json(const nlohmann::json& j) {
    try {
        if (j.at("format") != "surveyclust-model/1") throw ParseError("unsupported model format");
        ClusterModel model;
        model.method = parse_method(j.at("method").get<std::string>());
        model.k_requested = j.at("k_requested").get<std::size_t>();
        model.k = j.at("k").get<std::size_t>();
        model.seed = j.at("seed").get<std::uint64_t>();
        model.standardized = j.at("standardized").get<bool>();
        model.metric = parse_metric(j.at("metric").get<std::string>());
        model.iterations = j.at("iterations").get<std::size_t>();
        model.converged = j.at("converged").get<bool>();
        if (!j.at("objective").is_null()) model.objective = j.at("objective").get<double>();
        model.objective_history = j.at("objective_history").get<std::vector<double>>();
        model.question_ids = j.at("question_ids").get<std::vector<std::string>>();
        model.respondent_ids = j.at("respondent_ids").get<std::vector<std::string>>();
        model.assignments = j.at("assignments").get<std::vector<int>>();
        model.centers = j.at("centers").get<std::vector<std::vector<double>>>();
        model.modes = j.at("modes").get<std::vector<std::vector<int>>>();
        model.warnings = j.at("warnings").get<std::vector<std::string>>();
        if (!j.at("dendrogram").is_null()) {
            const auto& d = j.at("dendrogram");
            Dendrogram tree;
            tree.leaves = d.at("leaves").get<std::size_t>();
            const std::string linkage = d.at("linkage").get<std::string>();
            tree.linkage = linkage == "single" ? Linkage::Single
                           : linkage == "average" ? Linkage::Average
                                                  : Linkage::Complete;
            tree.metric = parse_metric(d.at("metric").get<std::string>());
            for (const auto& m : d.at("merges")) {
                tree.merges.push_back({m.at(0).get<std::size_t>(), m.at(1).get<std::size_t>(), m.at(2).get<double>(),
                                       m.at(3).get<std::size_t>()});
            }
            model.dendrogram = std::move(tree);
        }
        if (model.assignments.size() != model.respondent_ids.size()) {
            throw ParseError("model has " + std::to_string(model.assignments.size()) + " assignments for " +
                             std::to_string(model.respondent_ids.size()) + " respondents");
        }
        for (int a : model.assignments) {
            if (a < 1 || static_cast<std::size_t>(a) > model.k) throw ParseError("assignment outside 1..k");
        }
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed model file: ") + e.what());
    } catch (const ConfigError& e) {
        throw ParseError(std::string("malformed model file: ") + e.what());
    }
}

void write_cluster_model(const std::filesystem::path& path, const ClusterModel& model) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write model file " + path.string());
    out << cluster_model_to_json(model).dump(1) << '\n';
}

ClusterModel read_cluster_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open model file " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return cluster_model_from_json(j);
}

}  // namespace surveyclust
