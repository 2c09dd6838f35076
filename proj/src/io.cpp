#include "cptmdp/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cptmdp/errors.hpp"

namespace cptmdp {

namespace {

using json = nlohmann::ordered_json;

double number_at(const json& obj, const char* key, const std::string& where, double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number() || !std::isfinite(v.get<double>())) throw ParseError(where + "/" + key, "expected a number");
    return v.get<double>();
}

std::vector<std::pair<double, double>> points_at(const json& obj, const std::string& where) {
    if (!obj.contains("points") || !obj.at("points").is_array())
        throw ParseError(where + "/points", "expected an array of [x, y] pairs");
    std::vector<std::pair<double, double>> pts;
    for (const json& p : obj.at("points")) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
            throw ParseError(where + "/points", "expected an array of [x, y] pairs");
        pts.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    return pts;
}

std::string kind_at(const json& obj, const std::string& where) {
    if (!obj.is_object() || !obj.contains("kind") || !obj.at("kind").is_string())
        throw ParseError(where + "/kind", "missing");
    return obj.at("kind").get<std::string>();
}

UtilitySpec parse_utility(const json& obj) {
    const std::string kind = kind_at(obj, "/utility");
    if (kind == "tk-power")
        return UtilitySpec::tk_power(number_at(obj, "alpha", "/utility", 0.88), number_at(obj, "beta", "/utility", 0.88),
                                     number_at(obj, "lambda", "/utility", 2.25));
    if (kind == "identity") return UtilitySpec::identity();
    if (kind == "piecewise") return UtilitySpec::piecewise(points_at(obj, "/utility"));
    throw ParseError("/utility/kind", "unknown utility kind '" + kind + "'");
}

WeightSpec parse_weight(const json& obj, const std::string& where, double default_exponent) {
    const std::string kind = kind_at(obj, where);
    if (kind == "tk") return WeightSpec::tk(number_at(obj, "exponent", where, default_exponent));
    if (kind == "identity") return WeightSpec::identity();
    if (kind == "piecewise") return WeightSpec::piecewise(points_at(obj, where));
    throw ParseError(where + "/kind", "unknown weight kind '" + kind + "'");
}

json utility_to_json(const UtilitySpec& u) {
    switch (u.kind) {
        case UtilityKind::TkPower:
            return {{"kind", "tk-power"}, {"alpha", u.alpha}, {"beta", u.beta}, {"lambda", u.lambda}};
        case UtilityKind::Identity:
            return {{"kind", "identity"}};
        case UtilityKind::Piecewise: {
            json pts = json::array();
            for (const auto& [x, y] : u.points) pts.push_back({x, y});
            return {{"kind", "piecewise"}, {"points", pts}};
        }
    }
    return {};
}

json weight_to_json(const WeightSpec& w) {
    switch (w.kind) {
        case WeightKind::Tk:
            return {{"kind", "tk"}, {"exponent", w.exponent}};
        case WeightKind::Identity:
            return {{"kind", "identity"}};
        case WeightKind::Piecewise: {
            json pts = json::array();
            for (const auto& [x, y] : w.points) pts.push_back({x, y});
            return {{"kind", "piecewise"}, {"points", pts}};
        }
    }
    return {};
}

json strategy_doc(const Strategy& sigma) {
    json choices = json::object();
    for (const StateChoice& c : sigma.choices) {
        json dist = json::object();
        for (const auto& [a, p] : c.dist) dist[a] = p;
        choices[c.state] = dist;
    }
    return {{"scope", sigma.scope == StrategyScope::Original ? "original" : "quotient"},
            {"choices", choices},
            {"notes", sigma.notes}};
}

json frontier_doc(const ParetoApprox& frontier, const std::vector<double>& outcomes) {
    return {{"epsilon", frontier.epsilon_pareto}, {"outcomes", outcomes}, {"extreme_points", frontier.extreme_points}};
}

}  // namespace

CptParams parse_params(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError("byte " + std::to_string(e.byte), "invalid JSON");
    }
    if (!doc.is_object()) throw ParseError("", "parameter document must be a JSON object");
    CptParams std_params = CptParams::standard();
    UtilitySpec u = doc.contains("utility") ? parse_utility(doc.at("utility")) : std_params.utility;
    WeightSpec wg = doc.contains("weight_gain") ? parse_weight(doc.at("weight_gain"), "/weight_gain", 0.61)
                                                : std_params.weight_gain;
    WeightSpec wl = doc.contains("weight_loss") ? parse_weight(doc.at("weight_loss"), "/weight_loss", 0.69)
                                                : std_params.weight_loss;
    std::optional<double> lg, ll;
    if (doc.contains("lip_gain")) lg = number_at(doc, "lip_gain", "", 0.0);
    if (doc.contains("lip_loss")) ll = number_at(doc, "lip_loss", "", 0.0);
    LossRanking ranking = LossRanking::WorstFirst;
    if (doc.contains("loss_ranking")) {
        const json& r = doc.at("loss_ranking");
        std::string s = r.is_string() ? r.get<std::string>() : "";
        if (s == "worst-first")
            ranking = LossRanking::WorstFirst;
        else if (s == "reference-first")
            ranking = LossRanking::ReferenceFirst;
        else
            throw ParseError("/loss_ranking", "must be \"worst-first\" or \"reference-first\"");
    }
    return CptParams::make(u, wg, wl, lg, ll, ranking);
}

CptParams load_params(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path, "cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_params(buf.str());
}

std::string serialize_params(const CptParams& params) {
    json doc = {{"utility", utility_to_json(params.utility)},
                {"weight_gain", weight_to_json(params.weight_gain)},
                {"weight_loss", weight_to_json(params.weight_loss)},
                {"lip_gain", params.lip_gain},
                {"lip_loss", params.lip_loss},
                {"loss_ranking", params.loss_ranking == LossRanking::WorstFirst ? "worst-first" : "reference-first"}};
    return doc.dump(2) + "\n";
}

std::string strategy_json(const Strategy& sigma) { return strategy_doc(sigma).dump(2) + "\n"; }

std::string frontier_json(const ParetoApprox& frontier, const std::vector<double>& outcomes) {
    return frontier_doc(frontier, outcomes).dump(2) + "\n";
}

std::string result_json(const CptSolveResult& r, const ResultContext& ctx) {
    json doc;
    doc["objective"] = ctx.objective_kind;
    doc["mode"] = ctx.mode == Mode::Cpt ? "cpt" : "eu";
    doc["direction"] = ctx.direction == Direction::Max ? "max" : "min";
    doc["epsilon"] = ctx.epsilon;
    doc["value"] = r.value;
    doc["error_bound"] = r.error_bound;
    doc["outcomes"] = r.outcomes;
    doc["best_point"] = r.best_point;
    doc["best_prospect"] = {{"outcomes", r.best_prospect.outcomes}, {"probs", r.best_prospect.probs}};
    doc["lipschitz"] = r.lipschitz;
    doc["lipschitz_estimated"] = r.lipschitz_estimated;
    doc["strategy"] = strategy_doc(r.strategy);
    doc["frontier"] = frontier_doc(r.frontier, r.outcomes);
    doc["stats"] = {{"lp_calls", r.stats.lp_calls}, {"hypercubes_examined", r.stats.hypercubes_examined}};
    return doc.dump(2) + "\n";
}

ParetoApprox drop_coordinate(const ParetoApprox& frontier, std::size_t index) {
    ParetoApprox out;
    out.epsilon_pareto = frontier.epsilon_pareto;
    for (std::vector<double> p : frontier.extreme_points) {
        if (index < p.size()) p.erase(p.begin() + static_cast<long>(index));
        if (std::find(out.extreme_points.begin(), out.extreme_points.end(), p) == out.extreme_points.end())
            out.extreme_points.push_back(std::move(p));
    }
    return out;
}

std::string frontier_plot_csv(const ParetoApprox& frontier) {
    std::ostringstream out;
    auto pts = frontier.extreme_points;
    const std::size_t k = pts.empty() ? 0 : pts.front().size();
    if (k == 2) {
        std::sort(pts.begin(), pts.end());
        out << "x,y\n";
    } else {
        out << "# " << k << " objectives: extreme points only, no facet trace\n";
        for (std::size_t i = 0; i < k; ++i) out << (i ? "," : "") << "p" << i + 1;
        out << "\n";
    }
    for (const auto& p : pts) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            char buf[32];
            auto res = std::to_chars(buf, buf + sizeof buf, p[i]);
            out << (i ? "," : "") << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
        }
        out << "\n";
    }
    return out.str();
}

void emit_frontier_plot_data(const ParetoApprox& frontier, const std::string& path) {
    write_text(path, frontier_plot_csv(frontier));
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw Error("failed writing '" + path + "'");
}

}  // namespace cptmdp
