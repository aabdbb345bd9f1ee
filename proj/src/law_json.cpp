#include "rgw/law_json.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace rgw {

namespace {

double parse_plain(std::string_view s) {
    std::string buf(s);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(buf, &used);
    } catch (const std::exception&) {
        throw ContractError("not a number: '" + buf + "'");
    }
    if (used != buf.size()) throw ContractError("trailing characters in number: '" + buf + "'");
    if (!std::isfinite(v)) throw ContractError("number must be finite: '" + buf + "'");
    return v;
}

struct Parsed {
    Support support;
    std::vector<double> probs;
};

Parsed parse_schema(const nlohmann::json& j) {
    if (!j.is_object()) throw ContractError("law JSON must be an object");
    for (const auto& [k, _] : j.items()) {
        if (k != "support" && k != "probs") throw ContractError("unknown field in law JSON: " + k);
    }
    if (!j.contains("support") || !j.contains("probs")) throw ContractError("law JSON needs 'support' and 'probs'");
    const auto& s = j.at("support");
    const auto& p = j.at("probs");
    if (!s.is_array() || !p.is_array()) throw ContractError("'support' and 'probs' must be arrays");
    if (s.size() != p.size()) throw ContractError("'support' and 'probs' differ in length");
    Parsed out;
    for (const auto& x : s) {
        if (!x.is_number_integer()) throw ContractError("support entries must be integers");
        out.support.push_back(x.get<int>());
    }
    for (const auto& x : p) {
        if (x.is_number()) out.probs.push_back(x.get<double>());
        else if (x.is_string()) out.probs.push_back(parse_real(x.get<std::string>()));
        else throw ContractError("probs entries must be numbers or ratio strings");
    }
    return out;
}

} // namespace

double parse_real(std::string_view text) {
    auto slash = text.find('/');
    if (slash == std::string_view::npos) return parse_plain(text);
    double num = parse_plain(text.substr(0, slash));
    double den = parse_plain(text.substr(slash + 1));
    if (den == 0.0) throw ContractError("zero denominator in ratio");
    return num / den;
}

OffspringLaw law_from_json(const nlohmann::json& j) {
    auto p = parse_schema(j);
    return OffspringLaw(std::move(p.support), std::move(p.probs));
}

ProbVector prob_vector_from_json(const nlohmann::json& j) {
    auto p = parse_schema(j);
    return ProbVector(std::move(p.support), std::move(p.probs));
}

nlohmann::json load_json_argument(const std::string& text_or_path) {
    auto first = text_or_path.find_first_not_of(" \t\n");
    if (first != std::string::npos && (text_or_path[first] == '{' || text_or_path[first] == '[')) {
        try {
            return nlohmann::json::parse(text_or_path);
        } catch (const nlohmann::json::parse_error& e) {
            throw ContractError(std::string("invalid JSON: ") + e.what());
        }
    }
    std::ifstream in(text_or_path);
    if (!in) throw ContractError("cannot open JSON file: " + text_or_path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ContractError("invalid JSON in " + text_or_path + ": " + e.what());
    }
}

nlohmann::json to_json(const OffspringLaw& law) {
    return {{"support", law.support()},
            {"probs", std::vector<double>(law.weights().begin(), law.weights().end())}};
}

nlohmann::json to_json(const ProbVector& rho) {
    return {{"support", rho.support()},
            {"probs", std::vector<double>(rho.weights().begin(), rho.weights().end())}};
}

} // namespace rgw
