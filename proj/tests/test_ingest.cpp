#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "looptrack/ingest.hpp"
#include "oracles.hpp"

namespace looptrack {
namespace {

ParseResult parse(const std::string& text, const TrackSchema& schema = {}) {
  std::istringstream in(text);
  return parse_tracks(in, schema);
}

Track make_track(std::string sel, const std::vector<double>& times) {
  Track t;
  t.selector = std::move(sel);
  for (double s : times) t.points.push_back({-43.2, -22.9, s});
  return t;
}

TEST(ParseTracks, GroupsBySelector) {
  const auto r = parse(
      "selector,lat,lon,time\n"
      "A,1,1,0\nB,2,2,0\nA,1,1.1,10\nB,2,2.1,10\nA,1,1.2,20\n");
  ASSERT_EQ(r.tracks.size(), 2u);
  EXPECT_EQ(r.tracks[0].selector, "A");
  EXPECT_EQ(r.tracks[0].points.size(), 3u);
  EXPECT_EQ(r.tracks[1].points.size(), 2u);
  EXPECT_TRUE(r.errors.empty());
  EXPECT_EQ(r.rows_read, 5u);
  EXPECT_EQ(r.rows_accepted, 5u);
}

TEST(ParseTracks, SortsByTime) {
  const auto r = parse("selector,lat,lon,time\nA,0,3,30\nA,0,1,10\nA,0,2,20\n");
  ASSERT_EQ(r.tracks.size(), 1u);
  const auto& p = r.tracks[0].points;
  EXPECT_EQ(p[0].t, 10);
  EXPECT_EQ(p[1].t, 20);
  EXPECT_EQ(p[2].t, 30);
  EXPECT_EQ(p[0].lon, 1);
}

TEST(ParseTracks, RejectsLatitudeOutOfRange) {
  const auto r = parse("selector,lat,lon,time\nA,91,0,0\nA,10,0,1\n");
  ASSERT_EQ(r.errors.size(), 1u);
  EXPECT_EQ(r.errors[0].line, 2u);
  EXPECT_NE(r.errors[0].message.find("lat"), std::string::npos);
  ASSERT_EQ(r.tracks.size(), 1u);
  EXPECT_EQ(r.tracks[0].points.size(), 1u);
}

TEST(ParseTracks, BadRowsAreReportedNotFatal) {
  const auto r = parse(
      "selector,lat,lon,time\n"
      "A,abc,0,0\n"
      "A,0,180,0\n"
      ",0,0,0\n"
      "A,0,0\n"
      "A,0,0,notatime\n"
      "A,0,0,5\n");
  EXPECT_EQ(r.errors.size(), 5u);
  ASSERT_EQ(r.tracks.size(), 1u);
  EXPECT_EQ(r.tracks[0].points.size(), 1u);
}

TEST(ParseTracks, MissingColumnIsConfigError) {
  EXPECT_THROW(parse("id,lat,lon,time\nA,0,0,0\n"), ConfigError);
}

TEST(ParseTracks, ExactDuplicatesDroppedButNotSameTimeDifferentPlace) {
  const auto r = parse("selector,lat,lon,time\nA,0,0,0\nA,0,0,0\nA,0,1,0\n");
  ASSERT_EQ(r.tracks.size(), 1u);
  EXPECT_EQ(r.tracks[0].points.size(), 2u);
  EXPECT_EQ(r.duplicates_dropped, 1u);
}

TEST(ParseTracks, IsoTimesAndCustomSchema) {
  const auto r = parse(
      "MMSI;BaseDateTime;LAT;LON\n"
      "355692000;2021-06-01T00:00:00;38.0;-123.0\n"
      "355692000;2021-06-01 00:01:30Z;38.0;-123.001\n",
      {"MMSI", "LAT", "LON", "BaseDateTime", ';'});
  ASSERT_EQ(r.tracks.size(), 1u);
  ASSERT_EQ(r.tracks[0].points.size(), 2u);
  EXPECT_DOUBLE_EQ(r.tracks[0].points[0].t, 1622505600.0);
  EXPECT_DOUBLE_EQ(r.tracks[0].points[1].t - r.tracks[0].points[0].t, 90.0);
}

TEST(ParseTracks, QuotedFieldsAndBom) {
  const auto r = parse("\xEF\xBB\xBFselector,lat,lon,time\n\"bus, 12\",1,2,3\n");
  ASSERT_EQ(r.tracks.size(), 1u);
  EXPECT_EQ(r.tracks[0].selector, "bus, 12");
}

TEST(ParseTracks, EmptyInputYieldsNoTracks) {
  EXPECT_TRUE(parse("").tracks.empty());
  EXPECT_TRUE(parse("selector,lat,lon,time\n").tracks.empty());
}

TEST(ParseIso8601, Offsets) {
  EXPECT_EQ(*parse_iso8601("1970-01-01"), 0.0);
  EXPECT_EQ(*parse_iso8601("1970-01-01T01:00:00+01:00"), 0.0);
  EXPECT_EQ(*parse_iso8601("1970-01-01T00:00:00-0130"), 5400.0);
  EXPECT_DOUBLE_EQ(*parse_iso8601("1970-01-01T00:00:01.25Z"), 1.25);
  EXPECT_FALSE(parse_iso8601("1970-13-01").has_value());
  EXPECT_FALSE(parse_iso8601("1970-02-30").has_value());
  EXPECT_FALSE(parse_iso8601("garbage").has_value());
}

// Arbitrary bytes must only ever produce row errors or a clean parse.
TEST(ParseTracks, FuzzedInputNeverThrows) {
  std::mt19937_64 rng(7);
  const std::string alphabet = "AB,,,\"\n\n0123456789.-:TZ e+x";
  for (int trial = 0; trial < 300; ++trial) {
    std::string text = "selector,lat,lon,time\n";
    const int len = static_cast<int>(rng() % 200);
    for (int i = 0; i < len; ++i) text.push_back(alphabet[rng() % alphabet.size()]);
    ParseResult r;
    EXPECT_NO_THROW(r = parse(text));
    std::size_t points = 0;
    for (const auto& t : r.tracks) points += t.points.size();
    EXPECT_EQ(points + r.duplicates_dropped, r.rows_accepted);
  }
}

TEST(SegmentTrack, SplitsOnlyOnLongGaps) {
  const auto segs = segment_track(make_track("A", {0, 600, 600 + 46 * 60, 600 + 51 * 60}));
  ASSERT_EQ(segs.size(), 2u);
  EXPECT_EQ(segs[0].points.size(), 2u);
  EXPECT_EQ(segs[1].points.size(), 2u);
  EXPECT_EQ(segs[0].selector, "A#0");
  EXPECT_EQ(segs[1].selector, "A#1");
}

TEST(SegmentTrack, GapExactlyAtLimitDoesNotSplit) {
  const auto segs = segment_track(make_track("A", {0, 2700, 5400, 8100}));
  ASSERT_EQ(segs.size(), 1u);
  EXPECT_EQ(segs[0].selector, "A");
}

TEST(SegmentTrack, SinglePointPassesThrough) {
  const auto segs = segment_track(make_track("A", {5}));
  ASSERT_EQ(segs.size(), 1u);
  EXPECT_EQ(segs[0].points.size(), 1u);
}

TEST(SegmentTrack, ConcatenationAndIdempotence) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> times{0};
    for (int i = 0; i < 30; ++i) times.push_back(times.back() + static_cast<double>(rng() % 6000));
    const Track t = make_track("S", times);
    const auto segs = segment_track(t);
    std::vector<TrackPoint> joined;
    for (const auto& s : segs) {
      joined.insert(joined.end(), s.points.begin(), s.points.end());
      const auto again = segment_track(s);
      ASSERT_EQ(again.size(), 1u);
      EXPECT_EQ(again[0].points, s.points);
    }
    EXPECT_EQ(joined, t.points);
  }
}

TEST(ProjectLocal, EquatorDegree) {
  Track t;
  t.selector = "eq";
  t.points = {{0.0, 0.0, 100.0}, {1.0, 0.0, 3700.0}};
  const auto p = project_local(t);
  EXPECT_NEAR(p.points[1].x - p.points[0].x, 111.320, 1e-9);
  EXPECT_NEAR(p.points[1].y - p.points[0].y, 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(p.points[0].t, 0.0);
  EXPECT_DOUBLE_EQ(p.points[1].t, 1.0);
  EXPECT_DOUBLE_EQ(p.origin.t, 100.0);
}

TEST(ProjectLocal, CentroidMapsToOrigin) {
  Track t;
  t.points = {{10.0, 20.0, 0.0}, {10.2, 20.2, 1.0}, {10.1, 20.1, 2.0}};
  const auto p = project_local(t);
  EXPECT_NEAR(p.points[2].x, 0.0, 1e-9);
  EXPECT_NEAR(p.points[2].y, 0.0, 1e-9);
}

TEST(ProjectLocal, Latitude38) {
  Track t;
  t.points = {{-123.0, 38.0, 0.0}, {-122.99, 38.0, 60.0}};
  const auto p = project_local(t);
  const double dx = p.points[1].x - p.points[0].x;
  EXPECT_NEAR(dx, 111.320 * 0.01 * std::cos(38.0 * std::numbers::pi / 180.0), 1e-9);
  EXPECT_NEAR(dx, 0.877, 5e-4);
  const double h = testing::haversine_km(-123.0, 38.0, -122.99, 38.0);
  EXPECT_LT(std::abs(dx - h) / h, 0.005);
}

TEST(ProjectLocal, AgreesWithHaversineWithin50Km) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lat_d(-60.0, 60.0);
  std::uniform_real_distribution<double> lon_d(-179.0, 179.0);
  std::uniform_real_distribution<double> off(-0.2, 0.2);
  int checked = 0;
  while (checked < 500) {
    const double lat = lat_d(rng);
    const double lon = lon_d(rng);
    Track t;
    t.points = {{lon, lat, 0.0}, {lon + off(rng), lat + off(rng), 1.0}};
    const double h = testing::haversine_km(t.points[0].lon, t.points[0].lat, t.points[1].lon, t.points[1].lat);
    if (h > 50.0 || h < 0.01) continue;
    const auto p = project_local(t);
    const double d = std::hypot(p.points[1].x - p.points[0].x, p.points[1].y - p.points[0].y);
    EXPECT_LT(std::abs(d - h) / h, 0.01) << "lat " << lat << " lon " << lon;
    ++checked;
  }
}

TEST(ProjectLocal, UnwrapsAntimeridian) {
  Track t;
  t.points = {{179.9, 0.0, 0.0}, {-179.9, 0.0, 60.0}};
  const auto p = project_local(t);
  EXPECT_NEAR(p.points[1].x - p.points[0].x, 0.2 * 111.320, 1e-6);
}

TEST(ProjectLocal, WideTrackIsRejected) {
  Track t;
  t.points = {{0.0, 0.0, 0.0}, {50.0, 0.0, 60.0}, {100.0, 0.0, 120.0}};
  EXPECT_THROW(project_local(t), InputError);
}

TEST(ProjectLocal, UnprojectRoundTrip) {
  Track t;
  t.selector = "r";
  t.points = {{-43.21, -22.91, 1000.0}, {-43.20, -22.90, 1020.0}, {179.99, 10.0, 1040.0}};
  t.points.pop_back();
  const Track back = unproject(project_local(t));
  for (std::size_t i = 0; i < t.points.size(); ++i) {
    EXPECT_NEAR(back.points[i].lon, t.points[i].lon, 1e-12);
    EXPECT_NEAR(back.points[i].lat, t.points[i].lat, 1e-12);
    EXPECT_NEAR(back.points[i].t, t.points[i].t, 1e-6);
  }
}

TEST(Pipeline, ParseSegmentProjectConservesPoints) {
  std::ostringstream csv;
  csv << "selector,lat,lon,time\n";
  std::mt19937_64 rng(5);
  std::size_t valid = 0;
  for (int i = 0; i < 200; ++i) {
    const bool bad = rng() % 10 == 0;
    csv << "V" << (rng() % 5) << ',' << (bad ? 95.0 : 38.0 + 0.001 * i) << ",-123.0," << i * 600 << '\n';
    valid += !bad;
  }
  std::istringstream in(csv.str());
  const auto r = parse_tracks(in, {});
  std::size_t projected = 0;
  for (const auto& t : r.tracks) {
    for (const auto& s : segment_track(t)) projected += project_local(s).points.size();
  }
  EXPECT_EQ(projected, valid);
}

TEST(Downsample, KeepsEndpoints) {
  std::vector<int> v(101);
  for (int i = 0; i < 101; ++i) v[i] = i;
  const auto d = downsample(v, 11);
  ASSERT_EQ(d.size(), 11u);
  EXPECT_EQ(d.front(), 0);
  EXPECT_EQ(d.back(), 100);
  EXPECT_EQ(d[5], 50);
  EXPECT_EQ(downsample(v, 200).size(), 101u);
}

}  // namespace
}  // namespace looptrack
