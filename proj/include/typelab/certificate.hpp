#ifndef TYPELAB_CERTIFICATE_HPP
#define TYPELAB_CERTIFICATE_HPP

#include <string>

#include <json.hpp>

namespace typelab {

// A verdict record binding one statement to replayable numeric evidence.
// Verdicts are desk-scale: they describe the truncated inputs we actually
// tested, at the radius recorded in the record.
struct Certificate {
    std::string statement;                  // machine id, e.g. "proximity-integral"
    std::string anchor;                     // human-readable criterion description
    std::string direction = "predicate";    // lower_bound|upper_bound|exact|zero|infinite|predicate
    std::string verdict = "inconclusive";   // holds|fails|inconclusive, or finite|growing|inconclusive
    double value = std::numeric_limits<double>::quiet_NaN();
    double truncation_radius = 0;
    bool consistency_flag = false;          // set when the result conflicts with a reference value
    nlohmann::json params = nlohmann::json::object();
    nlohmann::json evidence = nlohmann::json::object();

    bool holds() const { return verdict == "holds" || verdict == "finite"; }

    nlohmann::json to_json() const;
    static Certificate from_json(const nlohmann::json& j);
};

} // namespace typelab

#endif
