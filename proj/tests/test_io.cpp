#include <gtest/gtest.h>

#include "hypslit/io.hpp"

using namespace hypslit;

namespace {

std::optional<ErrorKind> kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    return std::nullopt;
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    for (std::string l; std::getline(is, l);) out.push_back(l);
    return out;
}

}  // namespace

TEST(Parse, SlitList) {
    const auto s = parse_slit_list("[(0, 1), (-2.5,3e-1) ,(4,-2)]");
    ASSERT_EQ(s.size(), 3u);
    EXPECT_EQ(s[1].x, -2.5);
    EXPECT_EQ(s[1].top, 0.3);
    EXPECT_EQ(s[2].top, -2);
    EXPECT_EQ(kind_of([] { parse_slit_list("[(0,1), junk]"); }), ErrorKind::ConfigError);
    EXPECT_EQ(kind_of([] { parse_slit_list("[(0,x)]"); }), ErrorKind::ConfigError);
    EXPECT_EQ(kind_of([] { parse_slit_list("[]"); }), ErrorKind::DomainInvalid);
}

TEST(Parse, DomainSpec) {
    const DomainSpec a = parse_domain_spec("# two teeth\nslits = [(0,0),(1,2)]\n");
    EXPECT_EQ(a.kind, DomainKind::Slits);
    EXPECT_EQ(a.slits.size(), 2u);
    const DomainSpec b = parse_domain_spec("constructor = parabolic\nteeth = 3\nalpha = 3\nbeta = 0.6\n");
    EXPECT_EQ(b.kind, DomainKind::Parabolic);
    EXPECT_EQ(b.params.teeth, 3);
    EXPECT_EQ(b.params.alpha, 3);
    EXPECT_EQ(b.params.beta, 0.6);
    EXPECT_EQ(kind_of([] { parse_domain_spec("constructor = spiral\n"); }), ErrorKind::ConfigError);
    EXPECT_EQ(kind_of([] { parse_domain_spec("constructor = oscillating\nteeth = 2.5\n"); }), ErrorKind::ConfigError);
    EXPECT_EQ(kind_of([] { parse_domain_spec("teeth = 2\n"); }), ErrorKind::ConfigError);
    EXPECT_EQ(kind_of([] { parse_domain_spec("slits = [(0,0)]\nconstructor = parabolic\n"); }), ErrorKind::ConfigError);
}

TEST(Parse, BuildDomain) {
    const BuiltDomain d = build_domain(parse_domain_spec("slits = [(0,0),(1,0)]"), std::nullopt, 1);
    EXPECT_FALSE(d.ledger.has_value());
    EXPECT_EQ(d.omega.slits().size(), 2u);
    const ConstantsLedger L = build_ledger(2, 0.5, 0.1, 8);
    const BuiltDomain o = build_domain(parse_domain_spec("constructor = oscillating\nteeth = 4\n"), L, 1);
    ASSERT_TRUE(o.oscillating.has_value());
    EXPECT_EQ(o.oscillating->levels.size(), 4u);
    EXPECT_EQ(serialize_ledger(*o.ledger), serialize_ledger(L));
}

TEST(Csv, ProvenanceColumns) {
    CsvTable t({{"name", false}, {"v", true}});
    t.row().text("a,b").num(0.1, Provenance::CertifiedLo);
    t.row().text("say \"hi\"").num(2, Provenance::Exact);
    const auto L = lines(t.str());
    ASSERT_EQ(L.size(), 3u);
    EXPECT_EQ(L[0], "name,v,v_src");
    EXPECT_EQ(L[1], "\"a,b\",0.10000000000000001,certified-lo");
    EXPECT_EQ(L[2], "\"say \"\"hi\"\"\",2,exact");
    CsvTable bad({{"v", true}});
    bad.row().text("x");
    EXPECT_THROW(bad.str(), Error);
}

TEST(Csv, BoundsTableMarksExactRows) {
    const DistanceEngine eng(SlitDomain({{0, 0}}));
    const std::vector<std::pair<Point, Point>> pairs{{Point(1, 0), Point(2, 1)}};
    const std::string csv = bounds_csv(pairs, {eng.bound(pairs[0].first, pairs[0].second, 0)});
    const auto L = lines(csv);
    ASSERT_EQ(L.size(), 2u);
    EXPECT_EQ(L[0].rfind("zx,zx_src,zy,zy_src", 0), 0u);
    EXPECT_NE(L[1].find("exact,exact"), std::string::npos);
    EXPECT_EQ(L[1].find("certified"), std::string::npos);
}

TEST(Svg, Elements) {
    SvgScene s(Rect{-1, -1, 1, 1});
    s.slits(SlitDomain({{0, 0.5}}));
    s.rect(Rect{-0.5, -0.5, 0.5, 0.5}, "blue");
    s.polyline({Point(0, 0), Point(1, 1)}, "red");
    const std::string out = s.str();
    EXPECT_EQ(out.rfind("<svg", 0), 0u);
    EXPECT_NE(out.find("<rect"), std::string::npos);
    EXPECT_NE(out.find("stroke=\"red\""), std::string::npos);
    // y is flipped: the slit runs from the bottom of the view (y = 1 in SVG) to its tip
    EXPECT_NE(out.find("points=\"0,1 0,-0.5\""), std::string::npos);
    EXPECT_EQ(out.substr(out.size() - 7), "</svg>\n");
}

TEST(Files, AtomicWriteAndOutputDir) {
    const auto dir = std::filesystem::temp_directory_path() / "hypslit_io_test";
    std::filesystem::remove_all(dir);
    EXPECT_EQ(output_dir(dir.string()), dir);
    EXPECT_TRUE(std::filesystem::is_directory(dir));
    const auto f = dir / "a.txt";
    atomic_write(f, "first\n");
    atomic_write(f, "second\n");
    EXPECT_EQ(read_file(f), "second\n");
    EXPECT_FALSE(std::filesystem::exists(dir / "a.txt.tmp"));
    EXPECT_THROW(read_file(dir / "missing"), Error);
    EXPECT_THROW(atomic_write(dir / "no" / "such" / "file", "x"), Error);
    std::filesystem::remove_all(dir);
}

TEST(Files, LedgerRoundTripThroughDisk) {
    const auto dir = std::filesystem::temp_directory_path() / "hypslit_io_ledger";
    std::filesystem::create_directories(dir);
    const ConstantsLedger L = build_ledger(2, 0.5, 0.1, 8);
    atomic_write(dir / "ledger.txt", serialize_ledger(L));
    const ConstantsLedger M = deserialize_ledger(read_file(dir / "ledger.txt"));
    EXPECT_EQ(serialize_ledger(M), serialize_ledger(L));
    EXPECT_TRUE(ledger_violations(M).empty());
    std::filesystem::remove_all(dir);
}
