#include "sigverify/sigdata.hpp"

#include <filesystem>

#include "doctest.h"
#include "sigverify/rng.hpp"
#include "test_util.hpp"

using namespace sigverify;
using testutil::error_code_of;
using testutil::TempDir;

namespace {

const char* kThreeRows =
    "#signer_id\tw1\n"
    "#signature_id\ts1\n"
    "#modality\tstylus\n"
    "#label\tgenuine\n"
    "t\tx\ty\tp\n"
    "0\t10\t20\t512\n"
    "10\t11\t21\t500\n"
    "20\t12\t22\t490\n";

}  // namespace

TEST_CASE("parse_canonical maps header and rows") {
  const Signature sig = parse_canonical(kThreeRows);
  CHECK(sig.signer_id == "w1");
  CHECK(sig.signature_id == "s1");
  CHECK(sig.modality == Modality::Stylus);
  CHECK(sig.label == Label::Genuine);
  REQUIRE(sig.samples.size() == 3);
  CHECK(sig.samples[0].t == 0.0);
  CHECK(sig.samples[1].t == 10.0);
  CHECK(sig.samples[2].t == 20.0);
  CHECK(sig.samples[2].x == 12.0);
  CHECK(sig.samples[2].p == 490.0);
  CHECK_FALSE(sig.samples[0].azimuth.has_value());
}

TEST_CASE("parse_canonical rejects bad input") {
  const std::string header =
      "#signer_id\tw1\n#signature_id\ts1\n#modality\tstylus\n#label\tgenuine\n"
      "t\tx\ty\tp\n";

  CHECK(error_code_of([&] { parse_canonical(header); }) ==
        Errc::EmptySignature);
  CHECK(error_code_of([&] {
          parse_canonical(header + "10\t0\t0\t1\n5\t0\t0\t1\n");
        }) == Errc::NonMonotoneTimestamps);
  CHECK(error_code_of([&] { parse_canonical(header + "0\t0\t0\n"); }) ==
        Errc::MalformedRow);
  CHECK(error_code_of([&] { parse_canonical(header + "0\t0\t0\tabc\n"); }) ==
        Errc::MalformedRow);
  CHECK(error_code_of([&] { parse_canonical(header + "0\t0\t0\t-1\n"); }) ==
        Errc::MalformedRow);  // negative pressure
  CHECK(error_code_of([&] {
          parse_canonical("#signer_id\tw1\nt\tx\ty\tp\n0\t0\t0\t1\n");
        }) == Errc::MalformedHeader);  // missing keys
  CHECK(error_code_of([&] {
          parse_canonical("#nonsense\tv\n" + std::string(kThreeRows));
        }) == Errc::MalformedHeader);
}

TEST_CASE("equal timestamps are allowed") {
  const std::string text =
      "#signer_id\tw1\n#signature_id\ts1\n#modality\tstylus\n#label\tgenuine\n"
      "t\tx\ty\tp\n0\t0\t0\t1\n0\t1\t1\t1\n";
  CHECK(parse_canonical(text).samples.size() == 2);
}

TEST_CASE("canonical round-trip is exact for random signatures") {
  Rng rng(2024);
  for (int rep = 0; rep < 50; ++rep) {
    Signature sig = testutil::random_signature(rng, 1 + rng.below(40));
    if (rep % 2 == 0) {
      for (auto& s : sig.samples) {
        s.azimuth = rng.uniform(0.0, 359.9);
        s.altitude = rng.uniform(0.0, 90.0);
      }
    }
    const std::string text = serialize_canonical(sig);
    CHECK(parse_canonical(text) == sig);
    // Serialized form is a fixed point of parse-then-serialize.
    CHECK(serialize_canonical(parse_canonical(text)) == text);
  }
}

TEST_CASE("parse_svc2004 maps the documented column order") {
  const Signature sig = parse_svc2004("1\n100 200 1000 1 45 60 512\n");
  REQUIRE(sig.samples.size() == 1);
  const SignatureSample& s = sig.samples[0];
  CHECK(s.x == 100.0);
  CHECK(s.y == 200.0);
  CHECK(s.t == 1000.0);
  CHECK(s.azimuth == 45.0);
  CHECK(s.altitude == 60.0);
  CHECK(s.p == 512.0);
}

TEST_CASE("parse_svc2004 enforces the declared count") {
  const char* three_rows =
      "2\n"
      "0 0 0 1 0 0 1\n"
      "1 1 1 1 0 0 1\n"
      "2 2 2 1 0 0 1\n";
  CHECK(error_code_of([&] { parse_svc2004(three_rows); }) ==
        Errc::CountMismatch);
  CHECK(error_code_of([&] { parse_svc2004("3\n0 0 0 1 0 0 1\n"); }) ==
        Errc::CountMismatch);
  CHECK(error_code_of([&] { parse_svc2004("0\n"); }) == Errc::EmptySignature);
  CHECK(error_code_of([&] { parse_svc2004("x\n"); }) == Errc::MalformedRow);
}

TEST_CASE("svc2004 to canonical and back is sample-wise identical") {
  const char* text =
      "3\n"
      "100 200 1000 1 45 60 512\n"
      "101 201 1010 1 46 61 500\n"
      "102 202 1025 0 47 62 0\n";
  Signature imported = parse_svc2004(text);
  imported.signer_id = "U1";
  imported.signature_id = "S1";
  const Signature reparsed = parse_canonical(serialize_canonical(imported));
  CHECK(reparsed.samples == imported.samples);
  CHECK(reparsed == imported);
}

TEST_CASE("manifest round trip, duplicates and missing files") {
  TempDir dir;
  Rng rng(5);

  DatasetManifest manifest;
  manifest.base_dir = dir.path();
  for (int signer = 0; signer < 2; ++signer) {
    for (int i = 0; i < 5; ++i) {
      Signature sig = testutil::random_signature(rng, 4);
      sig.signer_id = "w" + std::to_string(signer);
      sig.signature_id = "s" + std::to_string(i);
      const std::string filename =
          sig.signer_id + "_" + sig.signature_id + ".sig.tsv";
      write_signature_file(sig, dir / filename);
      manifest.entries.push_back(ManifestEntry{sig.signer_id, sig.signature_id,
                                               Label::Genuine, Modality::Stylus,
                                               filename, {}});
    }
  }
  save_manifest(manifest, dir / "manifest.json");

  const DatasetManifest loaded = load_manifest(dir / "manifest.json");
  CHECK(loaded.entries.size() == 10);
  CHECK(loaded.entries == manifest.entries);
  CHECK(loaded.base_dir == dir.path());

  SUBCASE("duplicate (signer_id, signature_id) is rejected") {
    DatasetManifest dup = manifest;
    dup.entries.push_back(manifest.entries.front());
    save_manifest(dup, dir / "dup.json");
    CHECK(error_code_of([&] { load_manifest(dir / "dup.json"); }) ==
          Errc::DuplicateEntry);
  }

  SUBCASE("entry pointing at an absent file is rejected") {
    DatasetManifest missing = manifest;
    missing.entries.push_back(ManifestEntry{
        "w9", "s9", Label::Genuine, Modality::Stylus, "nope.sig.tsv", {}});
    save_manifest(missing, dir / "missing.json");
    CHECK(error_code_of([&] { load_manifest(dir / "missing.json"); }) ==
          Errc::MissingFile);
  }

  SUBCASE("malformed documents are rejected") {
    testutil::write_file(dir / "bad.json", "{not json");
    CHECK(error_code_of([&] { load_manifest(dir / "bad.json"); }) ==
          Errc::MalformedManifest);
    testutil::write_file(dir / "obj.json", "{}");
    CHECK(error_code_of([&] { load_manifest(dir / "obj.json"); }) ==
          Errc::MalformedManifest);
    testutil::write_file(dir / "field.json",
                         R"([{"signer_id":"a","signature_id":"b"}])");
    CHECK(error_code_of([&] { load_manifest(dir / "field.json"); }) ==
          Errc::MalformedManifest);
  }

  SUBCASE("split tags are validated") {
    DatasetManifest split = manifest;
    split.entries[0].split = "development";
    save_manifest(split, dir / "split.json");
    CHECK(load_manifest(dir / "split.json").entries[0].split == "development");
  }
}

TEST_CASE("load_signature_file adds path context to errors") {
  TempDir dir;
  testutil::write_file(dir / "broken.sig.tsv", "garbage");
  try {
    load_signature_file(dir / "broken.sig.tsv");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::MalformedHeader);
    CHECK(e.message().find("broken.sig.tsv") != std::string::npos);
  }
  CHECK(error_code_of([&] { load_signature_file(dir / "absent"); }) ==
        Errc::IoError);
}
