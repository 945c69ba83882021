#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "gap/error.hpp"
#include "gap/interchange.hpp"
#include "test_util.hpp"

using namespace gap;

namespace {

std::string record_json(const std::string& id, int frames = 5) {
  std::string refs;
  for (int k = 0; k < frames; ++k) {
    if (k) refs += ",";
    refs += "\"images/" + id + ".f" + std::to_string(k) + ".png\"";
  }
  return R"({"id":")" + id +
         R"(","name":"N","city":"C","country":"K","continent":"Europe",)"
         R"("north_south":"GlobalNorth","west_east":"GlobalWest","pageviews":10,)"
         R"("category":"tower","gt_image":"images/)" +
         id + R"(.gt.png","frame_refs":[)" + refs + "]}";
}

std::vector<std::byte> embedding_bytes(std::uint32_t magic, std::uint32_t n, std::uint32_t d,
                                       std::uint32_t rows, std::uint32_t cols,
                                       const std::vector<float>& values) {
  std::vector<std::byte> out;
  for (std::uint32_t v : {magic, n, d, rows, cols}) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xFF));
  }
  for (float f : values) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::byte>((bits >> (8 * i)) & 0xFF));
  }
  return out;
}

}  // namespace

TEST_CASE("manifest with two records loads with default config") {
  const std::string text =
      R"({"attractions":[)" + record_json("eiffel") + "," + record_json("kremlin") + "]}";
  const Benchmark b = parse_manifest(text, "/data/bench");
  REQUIRE(b.attractions.size() == 2);
  CHECK(b.config.n_frames == 5);
  CHECK(b.config.tau == 3000.0);
  CHECK(b.config.beta == 1.5);
  CHECK(b.attractions[0].gt_image == fs::path("/data/bench/images/eiffel.gt.png"));
  CHECK(b.attractions[1].frame_refs.size() == 5);
  CHECK(b.config.features_dir == fs::path("/data/bench/features"));
}

TEST_CASE("manifest config overrides") {
  const std::string text = R"({"config":{"n_frames":3,"tau":100,"beta":2},"attractions":[]})";
  const Benchmark b = parse_manifest(text, ".");
  CHECK(b.config.n_frames == 3);
  CHECK(b.config.tau == 100.0);
  CHECK(b.config.beta == 2.0);
}

TEST_CASE("manifest errors are typed") {
  SUBCASE("duplicate id") {
    const std::string text =
        R"({"attractions":[)" + record_json("eiffel") + "," + record_json("eiffel") + "]}";
    CHECK_THROWS_AS(parse_manifest(text, "."), ValidationError);
  }
  SUBCASE("malformed json") { CHECK_THROWS_AS(parse_manifest("{\"attractions\": [", "."), FormatError); }
  SUBCASE("negative pageviews") {
    std::string rec = record_json("x");
    rec.replace(rec.find("\"pageviews\":10"), 14, "\"pageviews\":-4");
    CHECK_THROWS_AS(parse_manifest(R"({"attractions":[)" + rec + "]}", "."), FormatError);
  }
  SUBCASE("unknown continent") {
    std::string rec = record_json("x");
    rec.replace(rec.find("Europe"), 6, "Atlantis");
    CHECK_THROWS_AS(parse_manifest(R"({"attractions":[)" + rec + "]}", "."), FormatError);
  }
  SUBCASE("non-positive tau") {
    CHECK_THROWS_AS(parse_manifest(R"({"config":{"tau":0},"attractions":[]})", "."), FormatError);
  }
  SUBCASE("missing field names the field") {
    std::string rec = record_json("x");
    rec.replace(rec.find("\"city\":\"C\","), 11, "");
    try {
      parse_manifest(R"({"attractions":[)" + rec + "]}", ".");
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(std::string(e.what()).find("attractions[0].city") != std::string::npos);
    }
  }
  SUBCASE("missing file is an IO error") {
    CHECK_THROWS_AS(load_manifest("/nonexistent/manifest.json"), IoError);
  }
}

TEST_CASE("embedding header and payload") {
  SUBCASE("2x3 on a 1x2 grid is normalized") {
    const auto bytes = embedding_bytes(kEmbeddingMagic, 2, 3, 1, 2, {3, 0, 4, 1, 2, 2});
    const PatchEmbeddings e = parse_embeddings(bytes);
    CHECK(e.num_patches == 2);
    CHECK(e.dim == 3);
    CHECK(e.tokens[0] == doctest::Approx(0.6));
    CHECK(e.tokens[2] == doctest::Approx(0.8));
    CHECK(e.tokens[3] == doctest::Approx(1.0 / 3.0));
    for (std::size_t i = 0; i < 2; ++i) {
      double sq = 0;
      for (double v : e.row(i)) sq += v * v;
      CHECK(std::sqrt(sq) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  SUBCASE("header claims 4 patches, payload has 3") {
    const auto bytes = embedding_bytes(kEmbeddingMagic, 4, 2, 2, 2, {1, 0, 0, 1, 1, 1});
    CHECK_THROWS_AS(parse_embeddings(bytes), FormatError);
  }
  SUBCASE("zero row") {
    const auto bytes = embedding_bytes(kEmbeddingMagic, 2, 2, 1, 2, {1, 0, 0, 0});
    CHECK_THROWS_AS(parse_embeddings(bytes), DegenerateError);
  }
  SUBCASE("bad magic") {
    const auto bytes = embedding_bytes(0x12345678, 1, 1, 1, 1, {1});
    CHECK_THROWS_AS(parse_embeddings(bytes), FormatError);
  }
  SUBCASE("grid does not cover patches") {
    const auto bytes = embedding_bytes(kEmbeddingMagic, 2, 1, 3, 1, {1, 1});
    CHECK_THROWS_AS(parse_embeddings(bytes), FormatError);
  }
  SUBCASE("truncated header") {
    auto bytes = embedding_bytes(kEmbeddingMagic, 1, 1, 1, 1, {1});
    bytes.resize(10);
    CHECK_THROWS_AS(parse_embeddings(bytes), FormatError);
  }
}

TEST_CASE("embedding round trip within float precision") {
  std::mt19937 rng(7);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t rows = 1 + rng() % 4, cols = 1 + rng() % 4, dim = 1 + rng() % 16;
    std::vector<double> v(rows * cols * dim);
    for (double& x : v) x = gauss(rng);
    const PatchEmbeddings e = make_embeddings(rows * cols, dim, rows, cols, v);
    const PatchEmbeddings back = parse_embeddings(serialize_embeddings(e));
    REQUIRE(back.tokens.size() == e.tokens.size());
    CHECK(back.grid_rows == rows);
    CHECK(back.grid_cols == cols);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::fabs(back.tokens[i] - e.tokens[i]) < 1e-6);
  }
}

TEST_CASE("masks") {
  std::vector<std::uint8_t> px(16, 0);
  for (int i : {0, 3, 5, 10, 15}) px[static_cast<std::size_t>(i)] = 200;
  const RegionMask m = make_mask({4, 4}, px, "building");
  CHECK(m.area == 5);
  CHECK(m.contains(1, 1));
  CHECK_FALSE(m.contains(1, 0));

  CHECK_THROWS_AS(make_mask({4, 4}, std::vector<std::uint8_t>(16, 0), "empty"), ValidationError);

  testutil::TempDir tmp("mask");
  write_mask(tmp / "m.png", m);
  const RegionMask back = read_mask(tmp / "m.png", ImageSize{4, 4});
  CHECK(back.area == 5);
  CHECK(back.pixels == m.pixels);
  CHECK_THROWS_AS(read_mask(tmp / "m.png", ImageSize{5, 4}), ValidationError);

  Raster8 blank{{4, 4}, 1, std::vector<std::uint8_t>(16, 0)};
  write_png(tmp / "blank.png", blank);
  CHECK_THROWS_AS(read_mask(tmp / "blank.png"), ValidationError);

  Raster8 rgb{{2, 2}, 3, std::vector<std::uint8_t>(12, 255)};
  write_png(tmp / "rgb.png", rgb);
  CHECK_THROWS_AS(read_mask(tmp / "rgb.png"), FormatError);
}

TEST_CASE("matches parse and validate bounds") {
  const ImageSize gt{10, 8}, fr{20, 16};
  SUBCASE("valid with comments and blank lines") {
    const MatchSet m = parse_matches("# header\n1 2 3 4 0.5\n\n9.5 7.9 19 15 1\n", gt, fr);
    REQUIRE(m.pairs.size() == 2);
    CHECK(m.pairs[1].gt == Point2{9.5, 7.9});
    CHECK(m.pairs[1].confidence == 1.0);
  }
  SUBCASE("empty file is an empty set") { CHECK(parse_matches("", gt, fr).pairs.empty()); }
  SUBCASE("gt coordinate (-1, 3)") {
    CHECK_THROWS_AS(parse_matches("-1 3 1 1 0.5\n", gt, fr), ValidationError);
  }
  SUBCASE("frame coordinate beyond width") {
    CHECK_THROWS_AS(parse_matches("1 1 20 1 0.5\n", gt, fr), ValidationError);
  }
  SUBCASE("confidence above 1") {
    CHECK_THROWS_AS(parse_matches("1 1 1 1 1.5\n", gt, fr), ValidationError);
  }
  SUBCASE("four fields") { CHECK_THROWS_AS(parse_matches("1 1 1 1\n", gt, fr), FormatError); }
  SUBCASE("garbage token") { CHECK_THROWS_AS(parse_matches("1 1 x 1 1\n", gt, fr), FormatError); }
  SUBCASE("nan") { CHECK_THROWS_AS(parse_matches("1 1 nan 1 1\n", gt, fr), FormatError); }
}

TEST_CASE("match file round trip is exact") {
  testutil::TempDir tmp("matches");
  MatchSet m;
  m.pairs = {{{0.1, 0.2}, {3.3333333333333335, 4.0}, 0.75}, {{9.999, 7.5}, {0, 0}, 0}};
  write_matches(tmp / "a.matches", m);
  const MatchSet back = read_matches(tmp / "a.matches", {10, 8}, {10, 8});
  REQUIRE(back.pairs.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back.pairs[i].gt == m.pairs[i].gt);
    CHECK(back.pairs[i].frame == m.pairs[i].frame);
    CHECK(back.pairs[i].confidence == m.pairs[i].confidence);
  }
}

TEST_CASE("luminance uses fixed weights") {
  CHECK(luminance(255, 0, 0) == doctest::Approx(76.245).epsilon(1e-12));
  CHECK(luminance(0, 255, 0) == doctest::Approx(149.685).epsilon(1e-12));
  CHECK(luminance(255, 255, 255) == doctest::Approx(255.0).epsilon(1e-12));

  testutil::TempDir tmp("gray");
  Raster8 rgb{{2, 1}, 3, {255, 0, 0, 0, 0, 255}};
  write_png(tmp / "rgb.png", rgb);
  const LuminanceRaster g = read_grayscale(tmp / "rgb.png");
  CHECK(g.at(0, 0) == doctest::Approx(76.245));
  CHECK(g.at(1, 0) == doctest::Approx(29.07));
}

TEST_CASE("judge and quality files") {
  SUBCASE("fine = 7 is rejected") {
    const char* text =
        R"([{"video_id":"a","global_alignment":4,"fine_alignment":7,"source":"VLM"}])";
    CHECK_THROWS_AS(parse_judge_scores(text, "j"), ValidationError);
  }
  SUBCASE("non-integer score") {
    const char* text =
        R"([{"video_id":"a","global_alignment":4.5,"fine_alignment":3,"source":"VLM"}])";
    CHECK_THROWS_AS(parse_judge_scores(text, "j"), FormatError);
  }
  SUBCASE("unknown source") {
    const char* text = R"([{"video_id":"a","global_alignment":4,"fine_alignment":3,"source":"X"}])";
    CHECK_THROWS_AS(parse_judge_scores(text, "j"), FormatError);
  }
  SUBCASE("quality above 5") {
    CHECK_THROWS_AS(parse_quality_scores(R"([{"video_id":"a","overall":5.5}])", "q"),
                    ValidationError);
  }
  SUBCASE("round trip") {
    testutil::TempDir tmp("judge");
    const std::vector<JudgeScores> in = {{"a", 4, 3, JudgeSource::VLM, std::nullopt},
                                         {"a", 5, 5, JudgeSource::Human, "ann7"}};
    write_judge_scores(tmp / "j.json", in);
    const auto out = read_judge_scores(tmp / "j.json");
    REQUIRE(out.size() == 2);
    CHECK(out[1].annotator_id == std::optional<std::string>("ann7"));
    CHECK(out[1].source == JudgeSource::Human);
    CHECK(out[0].fine_alignment == 3);

    const std::vector<QualityScore> q = {{"a", 3.25}};
    write_quality_scores(tmp / "q.json", q);
    CHECK(read_quality_scores(tmp / "q.json")[0].overall == 3.25);
  }
}

TEST_CASE("benchmark validation") {
  SUBCASE("pristine synthetic benchmark") {
    const Benchmark b = load_manifest(testutil::synthetic_dir() / "manifest.json");
    CHECK(validate_benchmark(b).empty());
  }
  SUBCASE("a 4-frame record under N = 5 is one violation") {
    Benchmark b = load_manifest(testutil::synthetic_dir() / "manifest.json");
    b.attractions[0].frame_refs.pop_back();
    const auto v = validate_benchmark(b);
    REQUIRE(v.size() == 1);
    CHECK(v[0].subject == b.attractions[0].id);
  }
  SUBCASE("missing mask file is an unresolvable reference") {
    Benchmark b = load_manifest(testutil::synthetic_dir() / "manifest.json");
    b.attractions[1].masks = {b.config.features_dir / "does_not_exist.mask.png"};
    const auto v = validate_benchmark(b);
    REQUIRE(v.size() == 1);
    CHECK(v[0].message.find("unresolvable reference") != std::string::npos);
  }
  SUBCASE("corrupt artifacts are reported, not thrown") {
    testutil::TempDir tmp("validate");
    testutil::copy_synthetic(tmp / "b");
    testutil::spit(tmp / "b/features/beta_bridge.f2.emb", "junk");
    testutil::spit(tmp / "b/features/gamma_gate.self.matches", "-1 0 0 0 1\n");
    const Benchmark b = load_manifest(tmp / "b/manifest.json");
    const auto v = validate_benchmark(b);
    CHECK(v.size() == 2);
  }
}

TEST_CASE("mask discovery follows the naming convention") {
  const Benchmark b = load_manifest(testutil::synthetic_dir() / "manifest.json");
  const FeatureLayout layout = feature_layout(b);
  CHECK(mask_paths(b.attractions[0], layout).size() == 2);
  CHECK(mask_paths(b.attractions[1], layout).size() == 1);
  CHECK(mask_paths(b.attractions[2], layout).empty());
  CHECK(layout.frame_embedding("x", 3).filename() == "x.f3.emb");
  CHECK(layout.self_matches("x").filename() == "x.self.matches");
}
