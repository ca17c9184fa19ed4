#include <filesystem>
#include <string>

#include <gtest/gtest.h>

#include "nodal/nodal_io.hpp"
#include "support.hpp"

using namespace nodal;

namespace {

ProblemConfig parse_config(const std::string& text) {
    return validate_config(raw_config_from_json(parse_json(text, ErrorKind::InvalidConfig, "config")));
}

}  // namespace

TEST(ConfigJson, SampleConfigsLoad) {
    const std::string dir = NODAL_CONFIG_DIR;
    ProblemConfig d = load_config(dir + "/D.json");
    EXPECT_DOUBLE_EQ(d.beta, 0.5);
    EXPECT_DOUBLE_EQ(d.sigma, 2.0);
    EXPECT_NEAR(d.c_even, -0.2520307, 1e-7);
    ProblemConfig t = load_config(dir + "/T.json");
    EXPECT_DOUBLE_EQ(t.mass, 0.0);
    EXPECT_DOUBLE_EQ(load_config(dir + "/P.json").beta, 1.0);
}

TEST(ConfigJson, PotentialKinds) {
    EXPECT_NEAR(parse_config(R"({"theta":1,"potential":{"kind":"cos","amplitude":-1}})").V(0.0), -1.0, 1e-15);
    EXPECT_NEAR(parse_config(R"({"theta":1,"potential":{"kind":"sin"}})").V(half_pi), 1.0 - 2.0 / pi, 1e-15);
    EXPECT_NEAR(parse_config(R"({"theta":1,"potential":{"kind":"poly","coefficients":[0,1]}})").V(1.0),
                1.0 - half_pi, 1e-15);
    ProblemConfig t = parse_config(R"({"theta":1,"potential":{"kind":"table","x":[0,3.141592653589793],"v":[1,-1]}})");
    EXPECT_NEAR(t.V(half_pi), 0.0, 1e-15);
}

TEST(ConfigJson, RoundTrip) {
    nodal::test::ConfigGenerator gen(51);
    for (int i = 0; i < 50; ++i) {
        ProblemConfig c = gen.config(false);
        json j = config_to_json(c);
        ProblemConfig back = validate_config(raw_config_from_json(j));
        EXPECT_EQ(dump(config_to_json(back)), dump(j));
        EXPECT_DOUBLE_EQ(back.c_even, c.c_even);
    }
}

TEST(ConfigJson, Rejects) {
    EXPECT_ERROR_KIND(parse_config("{"), ErrorKind::InvalidConfig);
    EXPECT_ERROR_KIND(parse_config("[]"), ErrorKind::InvalidConfig);
    EXPECT_ERROR_KIND(parse_config(R"({"beta":1})"), ErrorKind::InvalidConfig);
    EXPECT_ERROR_KIND(parse_config(R"({"theta":"one"})"), ErrorKind::InvalidConfig);
    EXPECT_ERROR_KIND(parse_config(R"({"theta":1,"colour":"red"})"), ErrorKind::InvalidConfig);
    EXPECT_ERROR_KIND(parse_config(R"({"theta":1,"potential":{"kind":"exp"}})"), ErrorKind::InvalidConfig);
    EXPECT_ERROR_KIND(parse_config(R"({"theta":1,"potential":{"kind":"cos","phase":1}})"), ErrorKind::InvalidConfig);
    EXPECT_ERROR_KIND(parse_config(R"({"theta":1,"potential":{"kind":"poly","coefficients":[1,"x"]}})"),
                      ErrorKind::InvalidConfig);
    EXPECT_ERROR_KIND(load_config("/nonexistent/config.json"), ErrorKind::Io);
}

TEST(NodalFileJson, RoundTripIsAFixedPoint) {
    NodalFile f;
    f.config = config_to_json(nodal::test::config_D());
    f.dataset.provenance = Provenance::forward_generated;
    f.dataset.entries[2] = NodalEntry{2.8136129, {0.7, 2.2}, std::nullopt};
    f.dataset.entries[4] = NodalEntry{std::nullopt, {0.1 / 3.0, 1.0, 2.0, 3.0}, 1};
    const std::string first = dump(nodal_file_to_json(f));
    NodalFile back = nodal_file_from_json(json::parse(first));
    const std::string second = dump(nodal_file_to_json(back));
    EXPECT_EQ(first, second);
    EXPECT_EQ(back.dataset.provenance, Provenance::forward_generated);
    EXPECT_FALSE(back.dataset.entries.at(4).mu_n.has_value());
    EXPECT_EQ(back.dataset.entries.at(4).first_label, 1);
    EXPECT_EQ(back.dataset.entries.at(4).nodes[0], 0.1 / 3.0);
}

TEST(NodalFileJson, Rejects) {
    auto parse = [](const std::string& s) { return nodal_file_from_json(json::parse(s)); };
    const std::string head = R"({"version":1,"header":{"provenance":"external-file"},"entries":)";
    EXPECT_NO_THROW(parse(head + R"([{"n":2,"mu_n":null,"nodes":[1,2]}]})"));
    EXPECT_ERROR_KIND(parse(head + R"([{"n":2,"nodes":[2,1]}]})"), ErrorKind::InvalidArgument);
    EXPECT_ERROR_KIND(parse(head + R"([{"n":3,"nodes":[1,2]}]})"), ErrorKind::NodeCountMismatch);
    EXPECT_ERROR_KIND(parse(head + R"([{"n":2,"nodes":[1,2]},{"n":2,"nodes":[1,2]}]})"), ErrorKind::InvalidArgument);
    EXPECT_ERROR_KIND(parse(head + R"([{"n":2}]})"), ErrorKind::InvalidArgument);
    EXPECT_ERROR_KIND(parse(R"({"version":2,"header":{"provenance":"external-file"},"entries":[]})"),
                      ErrorKind::InvalidArgument);
    EXPECT_ERROR_KIND(parse(R"({"version":1,"header":{"provenance":"guess"},"entries":[]})"),
                      ErrorKind::InvalidArgument);
}

TEST(Csv, HeaderAndRows) {
    EXPECT_EQ(to_csv({"n", "x"}, {{2, 0.5}, {4, 0.25}}), "n,x\n2,0.5\n4,0.25\n");
}

TEST(Files, WriteAndReadBack) {
    const auto path = std::filesystem::temp_directory_path() / "nodal_io_test.txt";
    write_text(path.string(), "abc\n");
    EXPECT_EQ(read_text(path.string()), "abc\n");
    std::filesystem::remove(path);
    EXPECT_ERROR_KIND(read_text(path.string()), ErrorKind::Io);
}
