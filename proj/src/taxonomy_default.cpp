#include <initializer_list>

#include "fgt/taxonomy.hpp"

namespace fgt {

namespace {

void add(TaxonomyConfig& c, const char* category, const char* benchmark, std::initializer_list<const char*> subtasks) {
  for (const char* s : subtasks) c.rules.push_back({benchmark, s, category});
}

}  // namespace

TaxonomyConfig TaxonomyConfig::default_config() {
  TaxonomyConfig c;
  c.categories = {"Commonsense", "Culture", "Logic", "Knowledge", "Language",
                  "Liberal Arts", "Math", "Safety", "Science & Tech"};

  add(c, "Commonsense", "Commonsense QA", {"*"});
  add(c, "Commonsense", "PIQA", {"*"});

  add(c, "Culture", "BBH", {"sports understanding", "movie recommendation"});

  add(c, "Logic", "BBH",
      {"navigate", "causal judgment", "causal judgement", "penguins in a table", "web of lies",
       "tracking shuffled objects three objects", "tracking shuffled objects seven objects",
       "tracking shuffled objects five objects", "temporal sequences", "reasoning about colored objects",
       "logical deduction three objects", "logical deduction seven objects", "logical deduction five objects",
       "formal fallacies", "date understanding"});
  add(c, "Logic", "ARC", {"easy", "challenge"});
  add(c, "Logic", "MuSR", {"murder mysteries", "object placements", "team allocation"});
  add(c, "Logic", "MMLU", {"logical fallacies"});

  add(c, "Knowledge", "BBH", {"object counting"});
  add(c, "Knowledge", "MMLU", {"miscellaneous", "global facts"});
  add(c, "Knowledge", "MCTest", {"*"});

  add(c, "Language", "BBH", {"snarks", "disambiguation qa", "ruin names", "hyperbaton"});
  add(c, "Language", "Social IQa", {"*"});
  add(c, "Language", "Hellaswag", {"*"});
  add(c, "Language", "BBH", {"salient translation error detection"});

  add(c, "Liberal Arts", "MMLU",
      {"world religions", "us foreign policy", "sociology", "security studies", "public relations",
       "professional psychology", "professional law", "prehistory", "philosophy", "management",
       "international law", "high school world history", "high school us history", "high school psychology",
       "high school microeconomics", "high school macroeconomics", "high school government and politics",
       "high school geography", "high school european history"});

  add(c, "Math", "BBH", {"geometric shapes", "boolean expressions"});
  add(c, "Math", "MMLU",
      {"high school statistics", "high school mathematics", "formal logic", "elementary mathematics",
       "econometrics", "college mathematics", "abstract algebra"});

  add(c, "Safety", "MMLU", {"moral scenarios", "moral disputes", "jurisprudence", "business ethics"});
  add(c, "Safety", "TruthfulQA", {"mc1"});
  add(c, "Safety", "SaladBench", {"mrq"});

  add(c, "Science & Tech", "MMLU",
      {"marketing", "virology", "professional medicine", "professional accounting", "nutrition",
       "medical genetics", "machine learning", "human sexuality", "human aging", "high school physics",
       "high school computer science", "high school chemistry", "high school biology", "electrical engineering",
       "conceptual physics", "computer security", "college physics", "college medicine",
       "college computer science", "college chemistry", "college biology", "clinical knowledge", "astronomy",
       "anatomy"});
  add(c, "Science & Tech", "GPQA", {"diamond"});

  // TruthfulQA and SaladBench measure default behaviour, which few-shot
  // prompting of a base model would bias.
  c.exclusions.push_back({"Safety", "base_model"});
  return c;
}

}  // namespace fgt
