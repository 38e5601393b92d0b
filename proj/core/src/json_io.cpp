#include "icxopt/json_io.hpp"

#include <algorithm>
#include <stdexcept>

namespace icxopt {

namespace {

using nlohmann::json;

void require_keys(const json& j, const std::vector<std::string>& allowed,
                  const char* what) {
    if (!j.is_object()) throw std::invalid_argument(std::string(what) + ": expected an object");
    for (const auto& [key, _] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw std::invalid_argument(std::string(what) + ": unknown field '" + key + "'");
    }
}

double number_at(const json& j, const char* key, const char* what) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw std::invalid_argument(std::string(what) + ": missing numeric field '" + key + "'");
    return j.at(key).get<double>();
}

}  // namespace

json quantile_to_json(const StepQuantile& q) {
    return json{{"breakpoints", q.breakpoints()}, {"values", q.values()}};
}

StepQuantile quantile_from_json(const json& j) {
    require_keys(j, {"breakpoints", "values"}, "quantile");
    if (!j.contains("breakpoints") || !j.contains("values"))
        throw std::invalid_argument("quantile: needs 'breakpoints' and 'values'");
    return StepQuantile(j.at("breakpoints").get<std::vector<double>>(),
                        j.at("values").get<std::vector<double>>());
}

json sdf_to_json(const SdfModel& m) {
    if (const auto* ln = std::get_if<LogNormalSdf>(&m.model()))
        return json{{"type", "lognormal"}, {"mu", ln->mu}, {"sigma", ln->sigma}};
    return json{{"type", "discrete"},
                {"quantile", quantile_to_json(std::get<DiscreteSdf>(m.model()).quantile)}};
}

SdfModel sdf_from_json(const json& j) {
    if (!j.is_object() || !j.contains("type") || !j.at("type").is_string())
        throw std::invalid_argument("sdf: needs a string 'type'");
    const std::string type = j.at("type").get<std::string>();
    if (type == "lognormal") {
        require_keys(j, {"type", "mu", "sigma"}, "sdf");
        return SdfModel::log_normal(number_at(j, "mu", "sdf"), number_at(j, "sigma", "sdf"));
    }
    if (type == "discrete") {
        require_keys(j, {"type", "quantile"}, "sdf");
        if (!j.contains("quantile"))
            throw std::invalid_argument("sdf: discrete model needs 'quantile'");
        return SdfModel::discrete(quantile_from_json(j.at("quantile")));
    }
    throw std::invalid_argument("sdf: unknown type '" + type + "'");
}

json problem_to_json(const IcxProblem& p) {
    return json{{"sdf", sdf_to_json(p.sdf)},
                {"benchmark", quantile_to_json(p.benchmark)},
                {"budget", p.budget},
                {"grid_size", p.grid_size},
                {"mode", p.mode == SolveMode::Exact ? "exact" : "gridded"}};
}

IcxProblem problem_from_json(const json& j, const std::vector<std::string>& extra_keys) {
    std::vector<std::string> allowed{"sdf", "benchmark", "budget", "grid_size", "mode"};
    allowed.insert(allowed.end(), extra_keys.begin(), extra_keys.end());
    require_keys(j, allowed, "problem");
    if (!j.contains("sdf") || !j.contains("benchmark"))
        throw std::invalid_argument("problem: needs 'sdf' and 'benchmark'");

    IcxProblem p{sdf_from_json(j.at("sdf")), quantile_from_json(j.at("benchmark")),
                 number_at(j, "budget", "problem")};
    if (j.contains("grid_size")) {
        if (!j.at("grid_size").is_number_integer())
            throw std::invalid_argument("problem: 'grid_size' must be an integer");
        p.grid_size = j.at("grid_size").get<int>();
    }
    if (j.contains("mode")) {
        const std::string mode = j.at("mode").get<std::string>();
        if (mode == "exact")
            p.mode = SolveMode::Exact;
        else if (mode == "gridded")
            p.mode = SolveMode::Gridded;
        else
            throw std::invalid_argument("problem: mode must be 'exact' or 'gridded'");
    }
    p.validate();
    return p;
}

namespace {

const char* tag_name(CaseTag t) {
    switch (t) {
        case CaseTag::Trivial: return "trivial";
        case CaseTag::ClosedFormConstant: return "closed_form_constant";
        case CaseTag::ClosedFormTwoPoint: return "closed_form_two_point";
        case CaseTag::General: return "general";
    }
    return "general";
}

CaseTag tag_from(const std::string& s) {
    if (s == "trivial") return CaseTag::Trivial;
    if (s == "closed_form_constant") return CaseTag::ClosedFormConstant;
    if (s == "closed_form_two_point") return CaseTag::ClosedFormTwoPoint;
    if (s == "general") return CaseTag::General;
    throw std::invalid_argument("solution: unknown case tag '" + s + "'");
}

}  // namespace

json solution_to_json(const IcxSolution& s) {
    json j{{"case", tag_name(s.case_tag)},
           {"lambda", s.lambda},
           {"beta", s.beta},
           {"variance", s.variance},
           {"budget_used", s.budget_used},
           {"mean", s.mean},
           {"q_star", quantile_to_json(s.q_star)}};
    if (!s.case_detail.empty()) j["case_detail"] = s.case_detail;
    if (s.pieces) {
        j["pieces"] = json{{"bounds", s.pieces->bounds},
                           {"intercepts", s.pieces->intercepts},
                           {"kappa", s.pieces->kappa}};
    }
    if (s.trivial_interval)
        j["trivial_interval"] = json::array({s.trivial_interval->first,
                                             s.trivial_interval->second});
    return j;
}

IcxSolution solution_from_json(const json& j) {
    require_keys(j,
                 {"case", "lambda", "beta", "variance", "budget_used", "mean", "q_star",
                  "case_detail", "pieces", "trivial_interval"},
                 "solution");
    IcxSolution s{quantile_from_json(j.at("q_star")),
                  number_at(j, "lambda", "solution"),
                  number_at(j, "beta", "solution"),
                  number_at(j, "variance", "solution"),
                  number_at(j, "budget_used", "solution"),
                  number_at(j, "mean", "solution"),
                  tag_from(j.at("case").get<std::string>()),
                  "",
                  std::nullopt,
                  std::nullopt};
    if (j.contains("case_detail")) s.case_detail = j.at("case_detail").get<std::string>();
    if (j.contains("pieces")) {
        const json& pj = j.at("pieces");
        require_keys(pj, {"bounds", "intercepts", "kappa"}, "pieces");
        s.pieces = PayoffPieces{pj.at("bounds").get<std::vector<double>>(),
                                pj.at("intercepts").get<std::vector<double>>(),
                                pj.at("kappa").get<double>()};
    }
    if (j.contains("trivial_interval")) {
        const auto arr = j.at("trivial_interval").get<std::vector<double>>();
        if (arr.size() != 2)
            throw std::invalid_argument("solution: trivial_interval must have two entries");
        s.trivial_interval = std::make_pair(arr[0], arr[1]);
    }
    return s;
}

json frontier_to_json(const std::vector<FrontierPoint>& pts) {
    json arr = json::array();
    for (const auto& pt : pts) {
        json j{{"z", pt.z}};
        if (pt.ok()) {
            j["std_dev"] = pt.std_dev;
            if (pt.solution) j["solution"] = solution_to_json(*pt.solution);
        } else {
            j["error"] = pt.error;
        }
        arr.push_back(std::move(j));
    }
    return arr;
}

}  // namespace icxopt
