#include "typelab/certificate.hpp"

#include <cmath>

namespace typelab {

namespace {
// JSON has no inf/nan literals; encode extended reals as strings.
nlohmann::json encode_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

double decode_real(const nlohmann::json& j) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        return std::numeric_limits<double>::quiet_NaN();
    }
    return j.get<double>();
}
} // namespace

nlohmann::json Certificate::to_json() const {
    nlohmann::json j;
    j["statement"] = statement;
    j["anchor"] = anchor;
    j["direction"] = direction;
    j["verdict"] = verdict;
    j["value"] = encode_real(value);
    j["truncation_radius"] = truncation_radius;
    j["consistency_flag"] = consistency_flag;
    j["params"] = params;
    j["evidence"] = evidence;
    return j;
}

Certificate Certificate::from_json(const nlohmann::json& j) {
    Certificate c;
    c.statement = j.at("statement").get<std::string>();
    c.anchor = j.value("anchor", std::string{});
    c.direction = j.value("direction", std::string{"predicate"});
    c.verdict = j.at("verdict").get<std::string>();
    c.value = decode_real(j.at("value"));
    c.truncation_radius = j.value("truncation_radius", 0.0);
    c.consistency_flag = j.value("consistency_flag", false);
    c.params = j.value("params", nlohmann::json::object());
    c.evidence = j.value("evidence", nlohmann::json::object());
    return c;
}

} // namespace typelab
