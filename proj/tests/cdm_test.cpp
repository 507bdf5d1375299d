#include <gtest/gtest.h>

#include <random>

#include "lila/cdm/convert.hpp"
#include "lila/datalog/evaluate.hpp"
#include "lila/datalog/syntax.hpp"
#include "support/random_payloads.hpp"

using namespace lila;
using namespace lila::cdm;
using datalog::Value;

namespace {

FormatSpec spec(Format f, const std::string& decls) {
  FormatSpec s;
  s.format = f;
  for (const auto& r : datalog::parse_program(decls).queries) s.relations.push_back(r);
  return s;
}

// Declarations are written as queries so their arguments stay variables.
FormatSpec json_spec(const std::string& decls) { return spec(Format::json, decls); }

}  // namespace

TEST(ToCdm, SingleFactMessage) {
  auto m = to_cdm(R"([{"matching" : "true"}])", json_spec("?-match(matching)."));
  EXPECT_EQ(m.body.facts, datalog::parse_program("match(\"true\").").facts);
  EXPECT_EQ(m.header.meta, (MetaFacts{{"match", "matching", 1}}));
  EXPECT_EQ(datalog::print_facts(meta_facts(m.header.meta)), "meta(\"match\",\"matching\",1).\n");
}

TEST(ToCdm, MultiFactMessage) {
  auto m = to_cdm(R"([{"matching":"true", "count":1},
                     {"matching":"false", "count":2}])",
                  json_spec("?-match(matching,count)."));
  EXPECT_EQ(m.body.facts, datalog::parse_program("match(\"true\",1). match(\"false\",2).").facts);
  EXPECT_EQ(parameter_names(m.header.meta, "match"), (std::vector<std::string>{"matching", "count"}));
}

TEST(ToCdm, EmptyArrayKeepsMetaFacts) {
  auto m = to_cdm("[]", json_spec("?-match(matching,count)."));
  EXPECT_TRUE(m.body.facts.empty());
  EXPECT_EQ(m.header.meta.size(), 2u);
}

TEST(ToCdm, UndeclaredFieldsAreProjectedAway) {
  auto m = to_cdm(R"([{"pId":7,"firstN":"A","lastN":"B","age":30}])",
                  json_spec("?-pInfo(pId,firstN,lastN)."));
  EXPECT_EQ(m.body.facts, datalog::parse_program("pInfo(7,\"A\",\"B\").").facts);
}

TEST(ToCdm, TypesAndRejections) {
  auto m = to_cdm(R"([{"a":1.5,"b":true}])", json_spec("?-r(a,b)."));
  EXPECT_TRUE(m.body.facts.contains("r", {Value{1.5}, Value{"true"}}));
  EXPECT_THROW(to_cdm(R"([{"a":{"x":1},"b":1}])", json_spec("?-r(a,b).")), ConversionError);
  EXPECT_THROW(to_cdm(R"([{"a":null,"b":1}])", json_spec("?-r(a,b).")), ConversionError);
  EXPECT_THROW(to_cdm(R"([{"a":1)", json_spec("?-r(a,b).")), ConversionError);
  EXPECT_THROW(to_cdm(R"("text")", json_spec("?-r(a,b).")), ConversionError);
}

TEST(ToCdm, MissingKeyNamesRecordAndKey) {
  try {
    to_cdm(R"([{"a":1,"b":2},{"a":3}])", json_spec("?-r(a,b)."));
    FAIL();
  } catch (const ConversionError& e) {
    std::string msg = e.what();
    EXPECT_NE(msg.find("record 2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("'b'"), std::string::npos) << msg;
  }
}

TEST(ToCdm, SeveralDeclaredRelations) {
  auto m = to_cdm(R"([{"a":1},{"b":2},{"a":3,"b":4}])", json_spec("?-p(a). ?-q(b)."));
  EXPECT_EQ(m.body.facts, datalog::parse_program("p(1). p(3). q(2). q(4).").facts);
  EXPECT_THROW(to_cdm(R"([{"c":1}])", json_spec("?-p(a). ?-q(b).")), ConversionError);
}

TEST(ToCdm, Csv) {
  auto m = to_cdm("matching,count,note\n\"true\",1,x\nfalse,2.5,\"a,\"\"b\"\"\"\n",
                  spec(Format::csv, "?-match(matching,count,note)."));
  EXPECT_TRUE(m.body.facts.contains("match", {Value{"true"}, Value{1}, Value{"x"}}));
  EXPECT_TRUE(m.body.facts.contains("match", {Value{"false"}, Value{2.5}, Value{"a,\"b\""}}));
  EXPECT_THROW(to_cdm("a,b\n1\n", spec(Format::csv, "?-r(a,b).")), ConversionError);
  EXPECT_THROW(to_cdm("a,b\n\"1,2\n", spec(Format::csv, "?-r(a,b).")), ConversionError);
}

TEST(ToCdm, DatalogPassthroughLiftsMeta) {
  auto m = to_cdm("match(\"true\").\nmeta(\"match\",\"matching\",1).\n", FormatSpec{Format::datalog, {}});
  EXPECT_EQ(m.body.facts, datalog::parse_program("match(\"true\").").facts);
  EXPECT_EQ(m.header.meta, (MetaFacts{{"match", "matching", 1}}));
}

TEST(FromCdm, JsonKeyedByParameterNames) {
  Message m;
  m.body = datalog::parse_program("match(\"true\",1).");
  declare(m.header.meta, "match", {"matching", "count"});
  EXPECT_EQ(from_cdm(m, FormatSpec{Format::json, {}}, {"match"}), R"([{"matching":"true","count":1}])");
}

TEST(FromCdm, EmptyBody) {
  Message m;
  declare(m.header.meta, "match", {"matching", "count"});
  EXPECT_EQ(from_cdm(m, FormatSpec{Format::json, {}}, {"match"}), "[]");
  EXPECT_EQ(from_cdm(m, FormatSpec{Format::csv, {}}, {"match"}), "matching,count\r\n");
}

TEST(FromCdm, MotivatingExampleRecord) {
  Message m;
  m.body = datalog::parse_program("gByP(1,10,\"Lionel\",\"M.\"). other(1).");
  declare(m.header.meta, "gByP", {"period", "time", "firstN", "lastN"});
  auto out = from_cdm(m, FormatSpec{Format::json, {}}, {"gByP"});
  auto doc = nlohmann::json::parse(out);
  ASSERT_EQ(doc.size(), 1u);
  EXPECT_EQ(doc[0], nlohmann::json({{"period", 1}, {"time", 10}, {"firstN", "Lionel"}, {"lastN", "M."}}));
}

TEST(FromCdm, MissingMetaIsAnError) {
  Message m;
  m.body = datalog::parse_program("x(1).");
  EXPECT_THROW(from_cdm(m, FormatSpec{Format::json, {}}, {"x"}), ConversionError);
  EXPECT_THROW(from_cdm(m, FormatSpec{Format::csv, {}}, {"x"}), ConversionError);
}

TEST(FromCdm, CsvQuotesValuesThatWouldChangeType) {
  Message m;
  m.body = datalog::parse_program("r(\"12\",12,\"a,b\",\"\").");
  declare(m.header.meta, "r", {"s", "n", "c", "e"});
  EXPECT_EQ(from_cdm(m, FormatSpec{Format::csv, {}}, {"r"}), "s,n,c,e\r\n\"12\",12,\"a,b\",\"\"\r\n");
}

TEST(FromCdm, SeveralPredicates) {
  Message m;
  m.body = datalog::parse_program("a(1). b(2).");
  declare(m.header.meta, "a", {"x"});
  declare(m.header.meta, "b", {"y"});
  EXPECT_EQ(from_cdm(m, FormatSpec{Format::json, {}}, {"a", "b"}), R"([{"x":1},{"y":2}])");
  EXPECT_EQ(from_cdm(m, FormatSpec{Format::csv, {}}, {"a", "b"}), "x\r\n1\r\n\r\ny\r\n2\r\n");
  EXPECT_EQ(from_cdm(m, FormatSpec{Format::datalog, {}}, {"b"}), "meta(\"b\",\"y\",1).\nb(2).\n");
  // Blocks read back into both relations.
  auto back = to_cdm("x\r\n1\r\n\r\ny\r\n2\r\n", spec(Format::csv, "?-a(x). ?-b(y)."));
  EXPECT_EQ(back.body.facts, m.body.facts);
}

TEST(ProjectByName, KeepsNamedPositions) {
  Message m;
  declare(m.header.meta, "match", {"matching", "count"});
  EXPECT_EQ(project_by_name(m, "match", {"matching"}).to_string(),
            "match-projection(x1):-match(x1,_).");
  EXPECT_EQ(project_by_name(m, "match", {"count", "matching"}, "p").to_string(), "p(x1,x2):-match(x2,x1).");
  EXPECT_EQ(project_by_name(m, "match", {"matching", "count"}).to_string(),
            "match-projection(x1,x2):-match(x1,x2).");
  try {
    project_by_name(m, "match", {"nope"});
    FAIL();
  } catch (const Error& e) {
    std::string msg = e.what();
    EXPECT_NE(msg.find("matching, count"), std::string::npos) << msg;
  }
}

TEST(ProjectByName, EvaluatesToProjection) {
  Message m;
  m.body = datalog::parse_program("match(\"true\",1). match(\"false\",2).");
  declare(m.header.meta, "match", {"matching", "count"});
  datalog::Program p = m.body;
  p.rules.push_back(project_by_name(m, "match", {"count"}));
  auto out = datalog::evaluate(p).relation("match-projection");
  EXPECT_EQ(out, datalog::FactSet::Relation({{Value{1}}, {Value{2}}}));
}

TEST(Meta, MergeAndCheck) {
  MetaFacts a, b;
  declare(a, "p", {"x", "y"});
  declare(b, "p", {"x", "z"});
  declare(b, "q", {"k"});
  auto conflicts = merge_meta(a, b);
  EXPECT_EQ(conflicts, std::vector<std::string>{"p"});
  EXPECT_EQ(parameter_names(a, "q"), std::vector<std::string>{"k"});
  EXPECT_FALSE(check_meta(a));
  MetaFacts gap{{"p", "x", 1}, {"p", "y", 3}};
  EXPECT_TRUE(check_meta(gap));
}

TEST(Meta, MirroredOnlyWhenRulesReadMeta) {
  Message m;
  m.body = datalog::parse_program("a(1).");
  declare(m.header.meta, "a", {"x"});
  auto plain = datalog::parse_program("b(x):-a(x).").rules;
  auto reads = datalog::parse_program("n(p):-meta(p,_,_).").rules;
  EXPECT_FALSE(evaluation_facts(m, plain).has_predicate("meta"));
  EXPECT_TRUE(evaluation_facts(m, reads).has_predicate("meta"));
}

// Properties.

TEST(CdmProperties, JsonRoundTrip) {
  std::mt19937 rng(23);
  for (int i = 0; i < 200; ++i) {
    auto t = test_support::random_table(rng, Format::json);
    auto payload = test_support::to_json_payload(t, rng);
    auto msg = to_cdm(payload, t.spec);
    auto out = from_cdm(msg, t.spec, {"rel"});
    ASSERT_EQ(test_support::json_records(out), test_support::json_records(payload)) << payload << "\n" << out;
  }
}

TEST(CdmProperties, CsvRoundTrip) {
  std::mt19937 rng(29);
  for (int i = 0; i < 200; ++i) {
    auto t = test_support::random_table(rng, Format::csv);
    auto payload = test_support::to_csv_payload(t);
    auto msg = to_cdm(payload, t.spec);
    auto out = from_cdm(msg, t.spec, {"rel"});
    ASSERT_EQ(test_support::csv_records(out), test_support::csv_records(payload)) << payload << "\n" << out;
  }
}

TEST(CdmProperties, ProjectionSoundnessAndMetaCompleteness) {
  std::mt19937 rng(31);
  for (int i = 0; i < 100; ++i) {
    auto t = test_support::random_table(rng, Format::json);
    // Extra undeclared key on every record.
    auto doc = nlohmann::json::parse(test_support::to_json_payload(t, rng));
    for (auto& rec : doc) rec["undeclared"] = "zzz";
    auto msg = to_cdm(doc.dump(), t.spec);
    for (const auto& f : msg.body.facts.to_vector()) {
      ASSERT_EQ(f.args.size(), t.columns.size());
      for (const auto& v : f.args) ASSERT_FALSE(v == Value{"zzz"});
    }
    ASSERT_EQ(parameter_names(msg.header.meta, "rel"), t.columns);
    ASSERT_FALSE(check_meta(msg.header.meta));
  }
}
