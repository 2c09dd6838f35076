#include "cptmdp/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <unordered_map>

#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

#include "cptmdp/errors.hpp"
#include "cptmdp/prospect.hpp"

namespace cptmdp {

namespace {

using json = nlohmann::ordered_json;
using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

class IdIndex {
public:
    explicit IdIndex(const Model& m) {
        for (std::size_t i = 0; i < m.size(); ++i) map_.emplace(m.states[i].id, i);
    }
    std::optional<std::size_t> find(const std::string& id) const {
        auto it = map_.find(id);
        if (it == map_.end()) return std::nullopt;
        return it->second;
    }

private:
    std::unordered_map<std::string, std::size_t> map_;
};

std::string path_join(const std::string& base, const std::string& key) { return base + "/" + key; }

std::string id_of(const json& v, const std::string& where) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    throw ParseError(where, "state id must be a string");
}

cpp_rational parse_rational(const std::string& text, const std::string& where) {
    static const std::regex pattern(R"(^\s*(\d+)\s*(?:/\s*(\d+)\s*)?$)");
    std::smatch match;
    if (!std::regex_match(text, match, pattern))
        throw ParseError(where, "probability string must have the form \"num/den\"");
    cpp_int num(match[1].str());
    cpp_int den = match[2].matched ? cpp_int(match[2].str()) : cpp_int(1);
    if (den == 0) throw ParseError(where, "zero denominator");
    return cpp_rational(num, den);
}

std::string rational_text(const cpp_rational& r) {
    std::ostringstream out;
    out << boost::multiprecision::numerator(r);
    if (boost::multiprecision::denominator(r) != 1) out << "/" << boost::multiprecision::denominator(r);
    return out.str();
}

double number_at(const json& v, const std::string& where) {
    if (!v.is_number()) throw ParseError(where, "expected a number");
    double d = v.get<double>();
    if (!std::isfinite(d)) throw ParseError(where, "number is not finite");
    return d;
}

Model parse_structure(const json& doc) {
    if (!doc.is_object()) throw ParseError("", "model document must be a JSON object");
    Model m;
    if (!doc.contains("type")) throw ParseError("/type", "missing");
    const std::string type = doc.at("type").is_string() ? doc.at("type").get<std::string>() : "";
    if (type == "mc")
        m.kind = ModelKind::Mc;
    else if (type == "mdp")
        m.kind = ModelKind::Mdp;
    else
        throw ParseError("/type", "must be \"mc\" or \"mdp\"");

    if (!doc.contains("states") || !doc.at("states").is_array() || doc.at("states").empty())
        throw ParseError("/states", "must be a nonempty array");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < doc.at("states").size(); ++i) {
        std::string id = id_of(doc.at("states")[i], "/states/" + std::to_string(i));
        if (!seen.insert(id).second) throw ValidationError("duplicate state id '" + id + "'");
        m.states.push_back(State{id, {}});
    }
    const IdIndex index(m);
    if (!doc.contains("initial")) throw ParseError("/initial", "missing");
    std::string init = id_of(doc.at("initial"), "/initial");
    auto init_idx = index.find(init);
    if (!init_idx) throw ValidationError("initial state '" + init + "' is not declared");
    m.initial = *init_idx;

    if (!doc.contains("transitions") || !doc.at("transitions").is_object())
        throw ParseError("/transitions", "must be an object");
    const json& trans = doc.at("transitions");
    for (auto it = trans.begin(); it != trans.end(); ++it) {
        const std::string where = path_join("/transitions", it.key());
        auto s = index.find(it.key());
        if (!s) throw ValidationError("transitions reference undeclared state '" + it.key() + "'");
        if (!it.value().is_object()) throw ParseError(where, "must be an object of actions");
        for (auto at = it.value().begin(); at != it.value().end(); ++at) {
            const std::string awhere = path_join(where, at.key());
            if (!at.value().is_object() || at.value().empty())
                throw ParseError(awhere, "must be a nonempty object of successor probabilities");
            Action action{at.key(), {}};
            cpp_rational exact_sum = 0;
            bool all_exact = true;
            double sum = 0.0;
            for (auto st = at.value().begin(); st != at.value().end(); ++st) {
                const std::string swhere = path_join(awhere, st.key());
                auto t = index.find(st.key());
                if (!t) throw ValidationError("transition " + awhere + " targets undeclared state '" + st.key() + "'");
                Successor succ{*t, 0.0, ""};
                if (st.value().is_string()) {
                    cpp_rational r = parse_rational(st.value().get<std::string>(), swhere);
                    succ.prob = r.convert_to<double>();
                    succ.exact = rational_text(r);
                    exact_sum += r;
                } else {
                    succ.prob = number_at(st.value(), swhere);
                    all_exact = false;
                }
                if (succ.prob < 0.0) throw ValidationError("negative probability at " + swhere);
                sum += succ.prob;
                action.succ.push_back(std::move(succ));
            }
            if (all_exact ? exact_sum != 1 : std::abs(sum - 1.0) > kProbTol) {
                std::ostringstream msg;
                msg << "distribution " << awhere << " sums to " << sum << ", expected 1";
                throw ValidationError(msg.str());
            }
            std::sort(action.succ.begin(), action.succ.end(),
                      [](const Successor& a, const Successor& b) { return a.state < b.state; });
            m.states[*s].actions.push_back(std::move(action));
        }
    }
    m.validate();
    return m;
}

Objective parse_objective(const json& doc, const Model& m) {
    if (!doc.contains("objective")) return WeightedReachObjective{};
    const json& obj = doc.at("objective");
    if (!obj.is_object() || !obj.contains("kind") || !obj.at("kind").is_string())
        throw ParseError("/objective", "must be an object with a string \"kind\"");
    const std::string kind = obj.at("kind").get<std::string>();
    const IdIndex index(m);
    if (kind == "weighted-reachability") {
        WeightedReachObjective wr;
        if (obj.contains("penalty")) wr.penalty = number_at(obj.at("penalty"), "/objective/penalty");
        if (obj.contains("targets")) {
            if (!obj.at("targets").is_object()) throw ParseError("/objective/targets", "must be an object");
            for (auto it = obj.at("targets").begin(); it != obj.at("targets").end(); ++it) {
                auto s = index.find(it.key());
                if (!s) throw ValidationError("target '" + it.key() + "' is not a declared state");
                wr.targets[*s] = number_at(it.value(), "/objective/targets/" + it.key());
            }
        }
        return wr;
    }
    if (kind == "mean-payoff") {
        MeanPayoffObjective mp;
        mp.rewards.assign(m.size(), 0.0);
        if (obj.contains("rewards")) {
            if (!obj.at("rewards").is_object()) throw ParseError("/objective/rewards", "must be an object");
            for (auto it = obj.at("rewards").begin(); it != obj.at("rewards").end(); ++it) {
                auto s = index.find(it.key());
                if (!s) throw ValidationError("reward for undeclared state '" + it.key() + "'");
                mp.rewards[*s] = number_at(it.value(), "/objective/rewards/" + it.key());
            }
        }
        return mp;
    }
    if (kind == "total-reward")
        throw ValidationError(
            "unsupported objective kind 'total-reward': objectives with infinitely many outcomes are not supported");
    throw ValidationError("unsupported objective kind '" + kind + "'");
}

}  // namespace

std::optional<std::size_t> Model::find(std::string_view id) const {
    for (std::size_t i = 0; i < states.size(); ++i)
        if (states[i].id == id) return i;
    return std::nullopt;
}

std::size_t Model::index_of(std::string_view id) const {
    auto i = find(id);
    if (!i) throw ValidationError("unknown state '" + std::string(id) + "'");
    return *i;
}

bool Model::is_absorbing(std::size_t s) const {
    for (const Action& a : states[s].actions)
        if (a.succ.size() != 1 || a.succ[0].state != s) return false;
    return true;
}

void Model::validate() const {
    if (states.empty()) throw ValidationError("model has no states");
    if (initial >= states.size()) throw ValidationError("initial state out of range");
    for (const State& st : states) {
        if (st.actions.empty()) throw ValidationError("state '" + st.id + "' has no actions");
        if (kind == ModelKind::Mc && st.actions.size() != 1)
            throw ValidationError("Markov chain state '" + st.id + "' must have exactly one action");
        std::set<std::string> ids;
        for (const Action& a : st.actions) {
            if (!ids.insert(a.id).second)
                throw ValidationError("duplicate action '" + a.id + "' at state '" + st.id + "'");
            if (a.succ.empty()) throw ValidationError("action '" + a.id + "' at '" + st.id + "' has no successors");
            double sum = 0.0;
            for (std::size_t i = 0; i < a.succ.size(); ++i) {
                if (a.succ[i].state >= states.size()) throw ValidationError("successor out of range");
                if (i > 0 && a.succ[i].state <= a.succ[i - 1].state)
                    throw ValidationError("successors of '" + st.id + "/" + a.id + "' are not sorted or repeat");
                if (!(a.succ[i].prob >= 0.0)) throw ValidationError("negative probability");
                sum += a.succ[i].prob;
            }
            if (std::abs(sum - 1.0) > kProbTol)
                throw ValidationError("distribution '" + st.id + "/" + a.id + "' does not sum to 1");
        }
    }
}

ParsedModel parse_model(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        std::size_t line = 1;
        std::size_t col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(col), "invalid JSON");
    }
    try {
        ParsedModel out{parse_structure(doc), WeightedReachObjective{}};
        out.objective = parse_objective(doc, out.model);
        return out;
    } catch (const json::exception& e) {
        throw ParseError("", e.what());
    }
}

ParsedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path, "cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model(buf.str());
}

std::string serialize_model(const Model& m, const Objective& obj) {
    json doc;
    doc["type"] = m.kind == ModelKind::Mc ? "mc" : "mdp";
    json states = json::array();
    for (const State& s : m.states) states.push_back(s.id);
    doc["states"] = states;
    doc["initial"] = m.states[m.initial].id;
    json trans = json::object();
    for (const State& s : m.states) {
        json acts = json::object();
        for (const Action& a : s.actions) {
            json dist = json::object();
            for (const Successor& t : a.succ) {
                if (t.exact.empty())
                    dist[m.states[t.state].id] = t.prob;
                else
                    dist[m.states[t.state].id] = t.exact;
            }
            acts[a.id] = dist;
        }
        trans[s.id] = acts;
    }
    doc["transitions"] = trans;
    if (const auto* wr = std::get_if<WeightedReachObjective>(&obj)) {
        json targets = json::object();
        for (const auto& [s, r] : wr->targets) targets[m.states[s].id] = r;
        doc["objective"] = {{"kind", "weighted-reachability"}, {"targets", targets}, {"penalty", wr->penalty}};
    } else {
        const auto& mp = std::get<MeanPayoffObjective>(obj);
        json rewards = json::object();
        for (std::size_t s = 0; s < m.size(); ++s) rewards[m.states[s].id] = mp.rewards.at(s);
        doc["objective"] = {{"kind", "mean-payoff"}, {"rewards", rewards}};
    }
    return doc.dump(2) + "\n";
}

NormalizedProblem validate_objective(const Model& m, const WeightedReachObjective& obj) {
    NormalizedProblem out{m, WeightedReachObjective{{}, obj.penalty}};
    for (const auto& [s, r] : obj.targets) {
        if (s >= m.size()) throw ValidationError("target index out of range");
        // A target paying the penalty still stops the path.
        if (r != obj.penalty) out.objective.targets[s] = r;
        State& st = out.model.states[s];
        if (out.model.is_absorbing(s) && st.actions.size() == 1) continue;
        Action loop{st.actions.front().id, {Successor{s, 1.0, "1"}}};
        st.actions.assign(1, loop);
    }
    return out;
}

std::vector<double> outcome_vector(const WeightedReachObjective& obj) {
    std::vector<double> out{obj.penalty};
    for (const auto& [s, r] : obj.targets) out.push_back(r);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace cptmdp
