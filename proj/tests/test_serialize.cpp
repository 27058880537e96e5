#include "qrep/serialize.hpp"

#include "doctest.h"

#include <cstdio>
#include <fstream>

using namespace qrep;
using nlohmann::json;

namespace {

json three_mode_json() {
    const double r3 = 1.0 / std::sqrt(3.0);
    return json{{"name", "custom-three"},
                {"modes", 3},
                {"cutoff", 3},
                {"logical0", json::array({json{{"occupation", {1, 1, 1}}, {"re", 1.0}, {"im", 0.0}}})},
                {"logical1",
                 json::array({json{{"occupation", {3, 0, 0}}, {"re", r3}, {"im", 0.0}},
                              json{{"occupation", {0, 3, 0}}, {"re", r3}, {"im", 0.0}},
                              json{{"occupation", {0, 0, 3}}, {"re", r3}, {"im", 0.0}}})}};
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& content)
        : path("qrep_tmp_" + name) {
        std::ofstream f(path, std::ios::binary);
        f << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_SUITE("serialize") {

TEST_CASE("fock objects round trip") {
    Rng rng(83);
    const FockBasis b(2, 3);
    CHECK(basis_from_json(basis_to_json(b)) == b);

    const Operator op = annihilation(b, 1);
    const Operator op2 = operator_from_json(operator_to_json(op));
    CHECK(op2.basis == b);
    CHECK(max_abs_diff(op2.m, op.m) == 0.0);

    StateVector s{b, random_state(b.dim, rng)};
    const StateVector s2 = state_from_json(state_to_json(s));
    CHECK(max_abs_diff(s2.v, s.v) == 0.0);

    const DensityMatrix d = random_density_matrix(b, rng);
    const DensityMatrix d2 = density_from_json(density_to_json(d));
    CHECK(max_abs_diff(d2.m, d.m) == 0.0);
}

TEST_CASE("malformed payloads are rejected") {
    const FockBasis b(1, 2);
    json jop = operator_to_json(number_operator(b));

    json wrong_kind = jop;
    wrong_kind["kind"] = "state";
    CHECK_THROWS_AS(operator_from_json(wrong_kind), std::invalid_argument);

    json extra = jop;
    extra["comment"] = "hello";
    CHECK_THROWS_AS(operator_from_json(extra), std::invalid_argument);

    json missing = jop;
    missing.erase("basis");
    CHECK_THROWS_AS(operator_from_json(missing), std::invalid_argument);

    json short_entries = jop;
    short_entries["entries"].erase(0);
    CHECK_THROWS_AS(operator_from_json(short_entries), std::invalid_argument);

    json bad_entry = jop;
    bad_entry["entries"][0] = json::array({1.0});
    CHECK_THROWS_AS(operator_from_json(bad_entry), std::invalid_argument);

    json bad_basis = jop;
    bad_basis["basis"]["modes"] = 1.5;
    CHECK_THROWS_AS(operator_from_json(bad_basis), std::invalid_argument);
}

TEST_CASE("custom codes load and match the built-in definition") {
    const CodeSpec code = code_from_json(three_mode_json());
    CHECK(code.name == "custom-three");
    const CodeSpec ref = builtin_code("three-mode");
    CHECK(code.basis == ref.basis);
    CHECK(max_abs_diff(code.logical0, ref.logical0) < 1e-15);
    CHECK(max_abs_diff(code.logical1, ref.logical1) < 1e-15);

    json anon = three_mode_json();
    anon.erase("name");
    CHECK(code_from_json(anon).name == "custom");

    // an explicit kind tag and omitted zero imaginary parts are both fine
    json tagged = three_mode_json();
    tagged["kind"] = "code";
    for (auto& part : tagged["logical1"]) part.erase("im");
    CHECK(max_abs_diff(code_from_json(tagged).logical1, ref.logical1) < 1e-15);
}

TEST_CASE("custom code schema violations") {
    json dup = three_mode_json();
    dup["logical1"].push_back(dup["logical1"][0]);
    CHECK_THROWS_AS(code_from_json(dup), std::invalid_argument);

    json oob = three_mode_json();
    oob["logical0"][0]["occupation"] = {4, 1, 1};
    CHECK_THROWS_AS(code_from_json(oob), std::invalid_argument);

    json short_occ = three_mode_json();
    short_occ["logical0"][0]["occupation"] = {1, 1};
    CHECK_THROWS_AS(code_from_json(short_occ), std::invalid_argument);

    json not_ortho = three_mode_json();
    not_ortho["logical1"] = not_ortho["logical0"];
    CHECK_THROWS_AS(code_from_json(not_ortho), std::invalid_argument);

    json unnorm = three_mode_json();
    unnorm["logical0"][0]["re"] = 0.5;
    CHECK_THROWS_AS(code_from_json(unnorm), std::invalid_argument);

    json unknown = three_mode_json();
    unknown["color"] = "green";
    CHECK_THROWS_AS(code_from_json(unknown), std::invalid_argument);

    json missing = three_mode_json();
    missing.erase("logical1");
    CHECK_THROWS_AS(code_from_json(missing), std::invalid_argument);

    json wrong_kind = three_mode_json();
    wrong_kind["kind"] = "operator";
    CHECK_THROWS_AS(code_from_json(wrong_kind), std::invalid_argument);
}

TEST_CASE("loading codes from disk") {
    TempFile good("code.json", three_mode_json().dump());
    const CodeSpec code = load_custom_code(good.path);
    CHECK(code.basis.modes == 3);

    TempFile broken("broken.json", "{ not json");
    CHECK_THROWS_AS(load_custom_code(broken.path), std::invalid_argument);
    CHECK_THROWS_AS(load_custom_code("does_not_exist_anywhere.json"), std::invalid_argument);
}

TEST_CASE("deterministic float rendering") {
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(2.0 / 3.0) == "0.666666666667");
    CHECK(format_double(1e-12) == "1e-12");
    CHECK(format_double(-0.152003) == "-0.152003");
}

}  // TEST_SUITE
