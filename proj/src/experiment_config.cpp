#include "bellmag/experiment_config.hpp"

#include <cmath>
#include <map>
#include <optional>
#include <sstream>

#include "bellmag/core_model.hpp"

namespace bellmag::feasibility {

namespace {

enum class FieldKind { Rate, Duration, Temperature, Dimensionless };

const std::map<std::string, double>& unit_table(FieldKind kind) {
    static const std::map<std::string, double> rates = {
        {"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}, {"THz", 1e12}};
    static const std::map<std::string, double> durations = {
        {"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}, {"ps", 1e-12}};
    static const std::map<std::string, double> temperatures = {{"K", 1.0}, {"mK", 1e-3}};
    static const std::map<std::string, double> none = {};
    switch (kind) {
        case FieldKind::Rate: return rates;
        case FieldKind::Duration: return durations;
        case FieldKind::Temperature: return temperatures;
        default: return none;
    }
}

std::optional<double> parse_value(const nlohmann::json& value, FieldKind kind,
                                  const std::string& key, bool angular,
                                  std::vector<std::string>& errors) {
    double magnitude = 0.0;
    if (value.is_number()) {
        magnitude = value.get<double>();
    } else if (value.is_string() && kind != FieldKind::Dimensionless) {
        std::istringstream in(value.get<std::string>());
        std::string unit;
        if (!(in >> magnitude) || !(in >> unit)) {
            errors.push_back(key + ": expected \"<number> <unit>\", got " + value.dump());
            return std::nullopt;
        }
        const auto& units = unit_table(kind);
        const auto found = units.find(unit);
        if (found == units.end()) {
            errors.push_back(key + ": unknown unit \"" + unit + "\"");
            return std::nullopt;
        }
        magnitude *= found->second;
    } else {
        errors.push_back(key + ": expected a number" +
                         (kind == FieldKind::Dimensionless ? "" : " or unit string"));
        return std::nullopt;
    }
    if (kind == FieldKind::Rate && !angular) magnitude *= 2.0 * core::pi;
    return magnitude;
}

struct FieldSpec {
    double ExperimentParams::* member;
    FieldKind kind;
};

const std::map<std::string, FieldSpec>& field_table() {
    static const std::map<std::string, FieldSpec> fields = {
        {"g", {&ExperimentParams::g, FieldKind::Rate}},
        {"kappa1", {&ExperimentParams::kappa1, FieldKind::Rate}},
        {"kappa2", {&ExperimentParams::kappa2, FieldKind::Rate}},
        {"kappa_ex1", {&ExperimentParams::kappa_ex1, FieldKind::Rate}},
        {"kappa_ex2", {&ExperimentParams::kappa_ex2, FieldKind::Rate}},
        {"kappa_i1", {&ExperimentParams::kappa_i1, FieldKind::Rate}},
        {"kappa_i2", {&ExperimentParams::kappa_i2, FieldKind::Rate}},
        {"gamma", {&ExperimentParams::gamma, FieldKind::Rate}},
        {"omega_m", {&ExperimentParams::omega_m, FieldKind::Rate}},
        {"eps1", {&ExperimentParams::eps1, FieldKind::Rate}},
        {"eps2", {&ExperimentParams::eps2, FieldKind::Rate}},
        {"G1", {&ExperimentParams::G1, FieldKind::Rate}},
        {"G2", {&ExperimentParams::G2, FieldKind::Rate}},
        {"delta1", {&ExperimentParams::delta1, FieldKind::Rate}},
        {"delta2", {&ExperimentParams::delta2, FieldKind::Rate}},
        {"tau1", {&ExperimentParams::tau1, FieldKind::Duration}},
        {"tau2", {&ExperimentParams::tau2, FieldKind::Duration}},
        {"temperature", {&ExperimentParams::temperature, FieldKind::Temperature}},
        {"n_th", {&ExperimentParams::n_th, FieldKind::Dimensionless}},
        {"alpha1", {&ExperimentParams::alpha1, FieldKind::Dimensionless}},
        {"alpha2", {&ExperimentParams::alpha2, FieldKind::Dimensionless}},
    };
    return fields;
}

bool has(double v) { return !std::isnan(v); }

void check_json_value(nlohmann::json& block, const char* key, double value) {
    if (!std::isnan(value)) block[key] = value;
}

std::string check_line(const char* name, const ConditionCheck& check) {
    std::ostringstream os;
    os << "  " << name << ": ";
    if (std::isnan(check.value)) {
        os << "not evaluated (missing inputs)";
    } else {
        os.precision(4);
        os << check.value << " (threshold " << check.threshold << ") "
           << (check.pass ? "PASS" : "FAIL");
    }
    os << "\n";
    return os.str();
}

}  // namespace

ExperimentParams params_from_json(const nlohmann::json& config,
                                  std::vector<std::string>& errors) {
    ExperimentParams params;
    if (!config.is_object()) {
        errors.push_back("config root must be a JSON object");
        return params;
    }
    bool angular = false;
    if (config.contains("angular")) {
        if (!config["angular"].is_boolean())
            errors.push_back("angular: expected a boolean");
        else
            angular = config["angular"].get<bool>();
    }
    const auto& fields = field_table();
    for (const auto& [key, value] : config.items()) {
        if (key == "angular") continue;
        const auto found = fields.find(key);
        if (found == fields.end()) {
            errors.push_back(key + ": unknown key");
            continue;
        }
        const auto parsed = parse_value(value, found->second.kind, key, angular, errors);
        if (parsed) params.*(found->second.member) = *parsed;
    }

    for (const char* key : {"kappa1", "kappa2", "tau1", "tau2", "gamma"}) {
        const double v = params.*(fields.at(key).member);
        if (!has(v)) errors.push_back(std::string(key) + ": required key missing");
    }
    if (!has(params.G1) && !(has(params.g) && (has(params.alpha2) || has(params.eps2))))
        errors.push_back("G1: no coupling route for the first pulse "
                         "(need G1, or g with alpha2 or eps2)");
    if (!has(params.G2) && !(has(params.g) && (has(params.alpha1) || has(params.eps1))))
        errors.push_back("G2: no coupling route for the second pulse "
                         "(need G2, or g with alpha1 or eps1)");
    return params;
}

nlohmann::json report_to_json(const FeasibilityReport& report) {
    nlohmann::json block;
    check_json_value(block, "alpha1", report.alpha1);
    check_json_value(block, "alpha2", report.alpha2);
    check_json_value(block, "G1", report.G1);
    check_json_value(block, "G2", report.G2);
    check_json_value(block, "Gt1", report.Gt1);
    check_json_value(block, "Gt2", report.Gt2);
    check_json_value(block, "g1tau", report.g1tau);
    check_json_value(block, "g2tau", report.g2tau);
    check_json_value(block, "p", report.p);
    check_json_value(block, "T", report.T);
    check_json_value(block, "n_th", report.n_th);
    check_json_value(block, "squeeze_r", report.squeeze_r);
    check_json_value(block, "optimized_S", report.optimized_S);
    auto check_block = [](const ConditionCheck& check) {
        nlohmann::json j;
        if (!std::isnan(check.value)) {
            j["value"] = check.value;
            j["threshold"] = check.threshold;
            j["pass"] = check.pass;
        }
        return j;
    };
    block["checks"] = {{"weak_coupling_1", check_block(report.weak_coupling_1)},
                       {"weak_coupling_2", check_block(report.weak_coupling_2)},
                       {"decoherence", check_block(report.decoherence)},
                       {"over_coupling_1", check_block(report.over_coupling_1)},
                       {"over_coupling_2", check_block(report.over_coupling_2)}};
    block["warnings"] = report.warnings;
    return block;
}

std::string format_report(const FeasibilityReport& report) {
    std::ostringstream os;
    os.precision(6);
    os << "Derived protocol parameters\n";
    if (has(report.alpha1) || has(report.alpha2))
        os << "  pump amplitudes |alpha1| = " << report.alpha1
           << ", |alpha2| = " << report.alpha2 << "\n";
    os << "  G1 = " << report.G1 << " rad/s, G2 = " << report.G2 << " rad/s\n"
       << "  Gt1 = " << report.Gt1 << " rad/s, Gt2 = " << report.Gt2 << " rad/s\n"
       << "  pulse areas: g1tau = " << report.g1tau << ", g2tau = " << report.g2tau
       << "\n"
       << "  p = " << report.p << " (squeeze r = " << report.squeeze_r
       << "), T = " << report.T << "\n";
    if (has(report.n_th)) os << "  n_th = " << report.n_th << "\n";
    if (has(report.optimized_S)) os << "  optimized S = " << report.optimized_S << "\n";
    os << "Approximation checks\n"
       << check_line("weak coupling, pulse 1 (G1/kappa1)", report.weak_coupling_1)
       << check_line("weak coupling, pulse 2 (G2/kappa2)", report.weak_coupling_2)
       << check_line("decoherence margin ((tau1+tau2) gamma n_th)", report.decoherence)
       << check_line("over-coupling, mode 1 (kappa_i1/kappa_ex1)", report.over_coupling_1)
       << check_line("over-coupling, mode 2 (kappa_i2/kappa_ex2)", report.over_coupling_2);
    if (!report.warnings.empty()) {
        os << "Warnings\n";
        for (const auto& warning : report.warnings) os << "  - " << warning << "\n";
    }
    return os.str();
}

}  // namespace bellmag::feasibility
