#include "qrep/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>

namespace qrep {

namespace {

using nlohmann::json;

void require_keys(const json& j, const std::set<std::string>& required,
                  const std::set<std::string>& optional, const std::string& where) {
    if (!j.is_object()) throw std::invalid_argument(where + ": expected a JSON object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!required.count(key) && !optional.count(key))
            throw std::invalid_argument(where + ": unknown key '" + key + "'");
    }
    for (const auto& key : required)
        if (!j.contains(key))
            throw std::invalid_argument(where + ": missing key '" + key + "'");
}

json entries_to_json(const std::vector<cxd>& a) {
    json out = json::array();
    for (const cxd& v : a) out.push_back(json::array({v.real(), v.imag()}));
    return out;
}

std::vector<cxd> entries_from_json(const json& j, const std::string& where) {
    if (!j.is_array()) throw std::invalid_argument(where + ": entries must be an array");
    std::vector<cxd> a;
    a.reserve(j.size());
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
            throw std::invalid_argument(where + ": each entry must be [re, im]");
        a.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
    return a;
}

std::string expect_kind(const json& j, const std::string& kind) {
    require_keys(j, {"kind", "basis", "entries"}, {}, kind);
    if (j.at("kind").get<std::string>() != kind)
        throw std::invalid_argument("expected kind '" + kind + "', found '" +
                                    j.at("kind").get<std::string>() + "'");
    return kind;
}

}  // namespace

nlohmann::json basis_to_json(const FockBasis& basis) {
    return {{"modes", basis.modes}, {"cutoff", basis.cutoff}};
}

FockBasis basis_from_json(const nlohmann::json& j) {
    require_keys(j, {"modes", "cutoff"}, {}, "basis");
    if (!j.at("modes").is_number_integer() || !j.at("cutoff").is_number_integer())
        throw std::invalid_argument("basis: modes and cutoff must be integers");
    return FockBasis(j.at("modes").get<int>(), j.at("cutoff").get<int>());
}

nlohmann::json operator_to_json(const Operator& op) {
    return {{"kind", "operator"}, {"basis", basis_to_json(op.basis)},
            {"entries", entries_to_json(op.m.a)}};
}

Operator operator_from_json(const nlohmann::json& j) {
    expect_kind(j, "operator");
    const FockBasis basis = basis_from_json(j.at("basis"));
    Mat m(basis.dim);
    m.a = entries_from_json(j.at("entries"), "operator");
    if (m.a.size() != basis.dim * basis.dim)
        throw std::invalid_argument("operator: entry count does not match dim^2");
    return {basis, std::move(m)};
}

nlohmann::json state_to_json(const StateVector& s) {
    return {{"kind", "state"}, {"basis", basis_to_json(s.basis)},
            {"entries", entries_to_json(s.v.a)}};
}

StateVector state_from_json(const nlohmann::json& j) {
    expect_kind(j, "state");
    const FockBasis basis = basis_from_json(j.at("basis"));
    Vec v(basis.dim);
    v.a = entries_from_json(j.at("entries"), "state");
    if (v.a.size() != basis.dim)
        throw std::invalid_argument("state: entry count does not match the basis dimension");
    return {basis, std::move(v)};
}

nlohmann::json density_to_json(const DensityMatrix& d) {
    return {{"kind", "density"}, {"basis", basis_to_json(d.basis)},
            {"entries", entries_to_json(d.m.a)}};
}

DensityMatrix density_from_json(const nlohmann::json& j) {
    expect_kind(j, "density");
    const FockBasis basis = basis_from_json(j.at("basis"));
    Mat m(basis.dim);
    m.a = entries_from_json(j.at("entries"), "density");
    if (m.a.size() != basis.dim * basis.dim)
        throw std::invalid_argument("density: entry count does not match dim^2");
    return {basis, std::move(m)};
}

namespace {

Vec codeword_from_json(const nlohmann::json& j, const FockBasis& basis,
                       const std::string& where) {
    if (!j.is_array() || j.empty())
        throw std::invalid_argument(where + ": expected a non-empty array of components");
    Vec v(basis.dim);
    std::set<std::size_t> seen;
    for (const auto& part : j) {
        require_keys(part, {"occupation", "re"}, {"im"}, where);
        const auto& occ_j = part.at("occupation");
        if (!occ_j.is_array() || occ_j.size() != static_cast<std::size_t>(basis.modes))
            throw std::invalid_argument(where + ": occupation must list one count per mode");
        std::vector<int> occ;
        for (const auto& o : occ_j) {
            if (!o.is_number_integer())
                throw std::invalid_argument(where + ": occupations must be integers");
            const int n = o.get<int>();
            if (n < 0 || n > basis.cutoff)
                throw std::invalid_argument(where + ": occupation " + std::to_string(n) +
                                            " outside [0, cutoff=" +
                                            std::to_string(basis.cutoff) + "]");
            occ.push_back(n);
        }
        const std::size_t idx = basis.index_of(occ);
        if (!seen.insert(idx).second)
            throw std::invalid_argument(where + ": duplicate occupation entry");
        const nlohmann::json im = part.value("im", nlohmann::json(0.0));
        if (!part.at("re").is_number() || !im.is_number())
            throw std::invalid_argument(where + ": amplitudes must be numbers");
        v[idx] = cxd(part.at("re").get<double>(), im.get<double>());
    }
    return v;
}

}  // namespace

CodeSpec code_from_json(const nlohmann::json& j) {
    require_keys(j, {"modes", "cutoff", "logical0", "logical1"}, {"name", "kind"}, "code");
    if (j.contains("kind") && j.at("kind") != "code")
        throw std::invalid_argument("code: expected kind 'code'");
    if (!j.at("modes").is_number_integer() || !j.at("cutoff").is_number_integer())
        throw std::invalid_argument("code: modes and cutoff must be integers");
    const FockBasis basis(j.at("modes").get<int>(), j.at("cutoff").get<int>());
    CodeSpec code;
    code.name = j.value("name", std::string("custom"));
    code.basis = basis;
    code.logical0 = codeword_from_json(j.at("logical0"), basis, "logical0");
    code.logical1 = codeword_from_json(j.at("logical1"), basis, "logical1");
    code.validate();
    return code;
}

CodeSpec load_custom_code(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open code file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument("code file '" + path + "' is not valid JSON: " + e.what());
    }
    return code_from_json(j);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace qrep
