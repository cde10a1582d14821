#pragma once

// JSON encoding of the domain types. All numbers travel as exact strings:
// integers as decimals, rationals as "p/q" (or "p" when the denominator is 1),
// Gaussian rationals as {"re": "p/q", "im": "p/q"}; matrices as row arrays.

#include <json.hpp>

#include "torusdist/kempf_ness.hpp"

namespace torusdist {

using Json = nlohmann::ordered_json;

inline Json to_json(const Int& z) { return z.get_str(); }

inline Json to_json(const Rat& q) {
    if (den(q) == 1) return num(q).get_str();
    return num(q).get_str() + "/" + den(q).get_str();
}

inline Json to_json(const GaussianRational& g) {
    return Json{{"re", to_json(g.re)}, {"im", to_json(g.im)}};
}

inline Int int_from_json(const Json& j) {
    if (j.is_number_integer()) return Int(j.get<long>());
    if (!j.is_string()) throw ContractError("json: expected an integer string");
    try {
        return Int(j.get<std::string>());
    } catch (const std::invalid_argument&) {
        throw ContractError("json: malformed integer '" + j.get<std::string>() + "'");
    }
}

inline Rat rat_from_json(const Json& j) {
    if (j.is_number_integer()) return Rat(j.get<long>());
    if (!j.is_string()) throw ContractError("json: expected a rational string");
    std::string s = j.get<std::string>();
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rat(Int(s));
        return make_rat(Int(s.substr(0, slash)), Int(s.substr(slash + 1)));
    } catch (const std::invalid_argument&) {
        throw ContractError("json: malformed rational '" + s + "'");
    }
}

inline GaussianRational gauss_from_json(const Json& j) {
    if (j.is_string() || j.is_number_integer()) return GaussianRational(rat_from_json(j), Rat(0));
    if (!j.is_object() || !j.contains("re") || !j.contains("im"))
        throw ContractError("json: Gaussian rational needs re and im");
    return {rat_from_json(j.at("re")), rat_from_json(j.at("im"))};
}

inline Json to_json(const RatVector& v) {
    Json a = Json::array();
    for (const auto& x : v) a.push_back(to_json(x));
    return a;
}

inline Json to_json(const IntVector& v) {
    Json a = Json::array();
    for (const auto& x : v) a.push_back(to_json(x));
    return a;
}

inline Json to_json(const GaussVector& v) {
    Json a = Json::array();
    for (const auto& x : v) a.push_back(to_json(x));
    return a;
}

inline RatVector rat_vector_from_json(const Json& j) {
    if (!j.is_array()) throw ContractError("json: expected an array");
    RatVector v;
    for (const auto& x : j) v.push_back(rat_from_json(x));
    return v;
}

inline IntVector int_vector_from_json(const Json& j) {
    if (!j.is_array()) throw ContractError("json: expected an array");
    IntVector v;
    for (const auto& x : j) v.push_back(int_from_json(x));
    return v;
}

inline GaussVector gauss_vector_from_json(const Json& j) {
    if (!j.is_array()) throw ContractError("json: expected an array");
    GaussVector v;
    for (const auto& x : j) v.push_back(gauss_from_json(x));
    return v;
}

inline Json to_json(const IntMatrix& m) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows; ++i) {
        Json row = Json::array();
        for (std::size_t j = 0; j < m.cols; ++j) row.push_back(to_json(m.at(i, j)));
        rows.push_back(row);
    }
    return rows;
}

inline Json to_json(const RatMatrix& m) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows; ++i) {
        Json row = Json::array();
        for (std::size_t j = 0; j < m.cols; ++j) row.push_back(to_json(m.at(i, j)));
        rows.push_back(row);
    }
    return rows;
}

inline IntMatrix int_matrix_from_json(const Json& j) {
    if (!j.is_array() || j.empty()) throw ContractError("json: expected a nonempty matrix");
    std::size_t rows = j.size(), cols = j.at(0).size();
    IntMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!j.at(i).is_array() || j.at(i).size() != cols)
            throw ContractError("json: ragged matrix");
        for (std::size_t c = 0; c < cols; ++c) m.at(i, c) = int_from_json(j.at(i).at(c));
    }
    return m;
}

inline RatMatrix rat_matrix_from_json(const Json& j) {
    if (!j.is_array() || j.empty()) throw ContractError("json: expected a nonempty matrix");
    std::size_t rows = j.size(), cols = j.at(0).size();
    RatMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!j.at(i).is_array() || j.at(i).size() != cols)
            throw ContractError("json: ragged matrix");
        for (std::size_t c = 0; c < cols; ++c) m.at(i, c) = rat_from_json(j.at(i).at(c));
    }
    return m;
}

inline Json to_json(const QuotientPoint& p) {
    return Json{{"rho", to_json(p.rho)}, {"theta", to_json(p.theta)}, {"err", to_json(p.err)}};
}

inline QuotientPoint quotient_point_from_json(const Json& j) {
    Rat err = j.contains("err") ? rat_from_json(j.at("err")) : Rat(0);
    return QuotientPoint(rat_vector_from_json(j.at("rho")), rat_vector_from_json(j.at("theta")), err);
}

inline Json to_json(const DistanceEstimate& e) {
    Json out{{"D", to_json(e.D)}, {"gamma", to_json(e.gamma)}};
    if (e.squared_exact) out["squared_exact"] = to_json(*e.squared_exact);
    return out;
}

inline Json to_json(const Certified& c) {
    return Json{{"value", to_json(c.value)}, {"err", to_json(c.err)}};
}

inline Json to_json(const SldpInstance& inst) {
    Json U = Json::array();
    for (const auto& u : inst.U_basis) U.push_back(to_json(u));
    return Json{{"t", to_json(inst.t)}, {"U", U}};
}

inline SldpInstance sldp_instance_from_json(const Json& j) {
    if (!j.contains("t")) throw ContractError("json: SLDP instance needs a target t");
    RatVector t = rat_vector_from_json(j.at("t"));
    std::vector<IntVector> U;
    if (j.contains("U"))
        for (const auto& u : j.at("U")) U.push_back(int_vector_from_json(u));
    return SldpInstance(std::move(t), std::move(U));
}

inline Json to_json(const CvpInstance& inst) {
    return Json{{"t", to_json(inst.t)}, {"G", to_json(inst.G)}};
}

inline CvpInstance cvp_instance_from_json(const Json& j) {
    if (!j.contains("t") || !j.contains("G"))
        throw ContractError("json: CVP instance needs t and G");
    return CvpInstance(rat_vector_from_json(j.at("t")), int_matrix_from_json(j.at("G")));
}

inline Json to_json(const LiftResult& l) {
    return Json{{"n", l.n}, {"s_total", to_json(l.s_total)}, {"Y", to_json(l.Y)}};
}

inline Json to_json(const Witness& w) {
    return Json{{"y", to_json(w.y)}, {"z", to_json(w.z)}};
}

}  // namespace torusdist
