// File formats for finite classes and the norm-family grammar used by `gamma`.
#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mixbound/chaining.hpp"
#include "mixbound/grid.hpp"
#include "mixbound/profile.hpp"
#include "mixbound/report.hpp"

namespace mixbound {

/// JSON: {"members": [[...], ...], "weights": [...], "names": [...]} (names optional).
inline FunctionClass class_from_json(const Json& j) {
    if (!j.contains("members") || !j.contains("weights"))
        throw std::invalid_argument("class file: needs 'members' and 'weights'");
    std::vector<Vec> members = j.at("members").get<std::vector<Vec>>();
    Vec w = j.at("weights").get<Vec>();
    std::vector<std::string> names;
    if (j.contains("names")) names = j.at("names").get<std::vector<std::string>>();
    return FunctionClass(std::move(members), std::move(w), std::move(names));
}

/// CSV: one row per member, first cell the member name; a row labelled
/// `weights` carries the support weights. Blank lines are skipped.
inline FunctionClass class_from_csv(std::istream& is) {
    std::vector<Vec> members;
    std::vector<std::string> names;
    Vec w;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        std::istringstream ls(line);
        std::string label, cell;
        std::getline(ls, label, ',');
        Vec row;
        while (std::getline(ls, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw std::invalid_argument("class file line " + std::to_string(lineno) + ": bad number '" + cell + "'");
            }
        }
        if (label == "weights") {
            w = std::move(row);
        } else {
            names.push_back(label);
            members.push_back(std::move(row));
        }
    }
    if (w.empty()) throw std::invalid_argument("class file: missing 'weights' row");
    return FunctionClass(std::move(members), std::move(w), std::move(names));
}

inline FunctionClass load_class_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open class file '" + path + "'");
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") return class_from_json(Json::parse(in));
    return class_from_csv(in);
}

/// `constant:l2`, `constant:linf`, `constant:lr:r=<float>`, or
/// `schedule:n=<int>,profile=<profile spec>` (profile last, it may contain commas).
inline NormFamily parse_norm_family(std::string_view spec, const Vec& weights) {
    if (spec == "constant:l2") return NormFamily::l2(weights);
    if (spec == "constant:linf") return NormFamily::linf(weights);
    if (spec.substr(0, 12) == "constant:lr:") return NormFamily::lr(weights, detail::parse_named_value(spec.substr(12), "r"));
    if (spec.substr(0, 9) == "schedule:") {
        const auto body = spec.substr(9);
        const auto at = body.find("profile=");
        if (at == std::string_view::npos) throw std::invalid_argument("norms: schedule needs profile=<spec>");
        auto head = body.substr(0, at);
        if (!head.empty() && head.back() == ',') head.remove_suffix(1);
        const auto n = static_cast<std::int64_t>(detail::parse_named_value(head, "n"));
        if (!is_lattice_member(n))
            throw std::invalid_argument("norms: n=" + std::to_string(n) + " is not a lattice member (nearest: " +
                                        std::to_string(nearest_lattice_member(n)) + ")");
        return NormFamily::schedule(weights, n, parse_profile(body.substr(at + 8)));
    }
    throw std::invalid_argument("unknown norm family '" + std::string(spec) +
                                "' (known: constant:l2, constant:linf, constant:lr:r=<r>, schedule:n=<n>,profile=<spec>)");
}

}  // namespace mixbound
