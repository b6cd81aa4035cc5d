#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "support.hpp"
#include "topicstream/error.hpp"
#include "topicstream/retrieval.hpp"

using namespace topicstream;
using Tokens = std::vector<std::string>;

TEST_CASE("tokenize") {
  CHECK(tokenize("What is Water-shortage?") == Tokens{"water", "shortage"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("C3PO c3po") == Tokens{"c3po", "c3po"});
  CHECK(tokenize("caf\xc3\xa9 au lait") == Tokens{"caf\xc3\xa9", "au", "lait"});
  CHECK(stopwords().size() == 33);
  CHECK(std::is_sorted(stopwords().begin(), stopwords().end()));
}

TEST_CASE("index construction") {
  SUBCASE("postings and average length") {
    DocStore docs;
    docs.add("d", "x y y");
    const auto idx = InvertedIndex::build(docs);
    CHECK(idx.avg_doc_len() == doctest::Approx(3.0));
    CHECK(idx.postings("x")[0].tf == 1);
    CHECK(idx.postings("y")[0].tf == 2);
  }
  SUBCASE("two docs of lengths 2 and 4") {
    DocStore docs;
    docs.add("d1", "x y");
    docs.add("d2", "x y z w");
    CHECK(InvertedIndex::build(docs).avg_doc_len() == doctest::Approx(3.0));
  }
  SUBCASE("all-stopword doc") {
    DocStore docs;
    docs.add("d1", "the of and");
    docs.add("d2", "river");
    const auto idx = InvertedIndex::build(docs);
    CHECK(idx.doc_length(idx.doc_number("d1")) == 0);
    CHECK(idx.postings("the").empty());
  }
  SUBCASE("empty store") {
    CHECK_THROWS_AS(InvertedIndex::build(DocStore{}), InputError);
  }
}

TEST_CASE("bm25_score") {
  SUBCASE("no overlap") {
    DocStore docs;
    docs.add("d", "river lake");
    const auto idx = InvertedIndex::build(docs);
    CHECK(bm25_score(Tokens{"desert"}, "d", idx) == 0.0);
  }
  SUBCASE("single doc, tf 1, len = avglen") {
    DocStore docs;
    docs.add("d", "river");
    const auto idx = InvertedIndex::build(docs);
    CHECK(bm25_score(Tokens{"river"}, "d", idx) == doctest::Approx(std::log(4.0 / 3.0)));
    CHECK(bm25_score(Tokens{"river"}, "d", idx, {2.0, 0.9}) ==
          doctest::Approx(0.2876820724517809));
  }
  SUBCASE("three-doc fixture matches the scalar formula") {
    DocStore docs;
    docs.add("d1", "river lake river");
    docs.add("d2", "lake desert sand sand sand");
    docs.add("d3", "river");
    const auto idx = InvertedIndex::build(docs);
    const Tokens q{"river", "sand", "lake"};
    for (const auto& [id, want] : testing::oracle_bm25(docs, q, 0.9, 0.4)) {
      CHECK(std::abs(bm25_score(q, id, idx) - want) < 1e-9);
    }
  }
  SUBCASE("unknown doc") {
    DocStore docs;
    docs.add("d", "river");
    const auto idx = InvertedIndex::build(docs);
    CHECK_THROWS_AS(bm25_score(Tokens{"river"}, "zz", idx), InputError);
  }
}

TEST_CASE("search") {
  const auto docs = testing::twenty_doc_fixture();
  const auto idx = InvertedIndex::build(docs);

  SUBCASE("no indexed terms") {
    CHECK(search(idx, "the unicorn", 10).entries.empty());
  }
  SUBCASE("k beyond the matching docs returns them all") {
    const auto r = search(idx, "violin", 1000);
    CHECK(r.entries.size() == idx.doc_freq("violin"));
  }
  SUBCASE("exhaustive scoring equals search") {
    const std::string q = "river water storm";
    std::vector<ScoredDoc> brute;
    for (const auto& id : idx.doc_ids()) {
      const double s = bm25_score(tokenize(q), id, idx);
      if (s > 0) brute.push_back({id, s});
    }
    std::sort(brute.begin(), brute.end(), [](const ScoredDoc& a, const ScoredDoc& b) {
      return a.score != b.score ? a.score > b.score : a.doc_id < b.doc_id;
    });
    const auto r = search(idx, q, 1000, {}, "q");
    CHECK(r.query_id == "q");
    CHECK(r.entries == brute);
  }
  SUBCASE("prefix property") {
    const auto full = search(idx, "lake rain piano", 100);
    for (std::size_t k : {1, 5, 10, 100}) {
      const auto r = search(idx, "lake rain piano", k);
      const std::size_t n = std::min(k, full.entries.size());
      REQUIRE(r.entries.size() == n);
      CHECK(std::equal(r.entries.begin(), r.entries.end(), full.entries.begin()));
    }
  }
}

TEST_CASE("write_run") {
  Ranking r{"q1", {{"d2", 1.5}, {"d1", 0.25}}};
  std::ostringstream out;
  write_run(std::span<const Ranking>(&r, 1), "bm25", out);
  CHECK(out.str() == "q1 Q0 d2 1 1.500000 bm25\nq1 Q0 d1 2 0.250000 bm25\n");
}
