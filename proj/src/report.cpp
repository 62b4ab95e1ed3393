#include "eds/report.hpp"

#include <sstream>

namespace eds {

nlohmann::ordered_json report_json(const CartanReport &rep, const std::string &system_name) {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["system"] = system_name;
    j["dim_m"] = rep.dim_m;
    j["p"] = rep.p;
    j["characters"] = rep.characters;
    j["predicted_dim"] = rep.predicted_dim;
    j["chart_equation_count"] = rep.chart_equation_count;
    j["jacobian_rank"] = rep.jacobian_rank;
    j["actual_dim"] = rep.actual_dim;
    j["involutive"] = rep.involutive;
    j["linearity_caveat"] = rep.linearity_caveat;
    j["generality"] = rep.generality;
    if (!rep.inequality_note.empty()) j["inequality"] = rep.inequality_note;
    return j;
}

std::string report_text(const CartanReport &rep, const std::string &system_name) {
    std::ostringstream os;
    os << "system " << system_name << " (dim M = " << rep.dim_m << ", p = " << rep.p << ")\n";
    os << "characters: (";
    for (size_t i = 0; i < rep.characters.size(); ++i) os << (i ? ", " : "") << rep.characters[i];
    os << ")\n";
    os << "predicted dimension: " << rep.predicted_dim << "\n";
    os << "actual dimension: " << rep.actual_dim << " (chart equations: " << rep.chart_equation_count
       << ", jacobian rank: " << rep.jacobian_rank << ")\n";
    os << "involutive: " << (rep.involutive ? "yes" : "no");
    if (!rep.involutive && !rep.inequality_note.empty()) os << " (" << rep.inequality_note << ")";
    os << "\n";
    if (rep.linearity_caveat)
        os << "note: chart equations are nonlinear; the actual dimension is the smooth-point local "
              "dimension\n";
    os << "generality: " << rep.generality << "\n";
    return os.str();
}

} // namespace eds
