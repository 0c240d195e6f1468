// Copyright 2026 The FieldSwap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <fstream>
#include <set>
#include <sstream>

#include "fieldswap/corpus_gen.hpp"
#include "json.hpp"

namespace fieldswap {

using nlohmann::json;

namespace {

struct FieldDef {
  const char* name;
  BaseType type;
  double frequency;
  std::vector<std::string> phrases;  // empty: no key phrase
};

CorpusSpec make_spec(std::string name, std::string domain, const std::vector<FieldDef>& defs,
                     std::vector<TemplateSpec> templates, NoiseSpec noise, std::uint64_t seed) {
  CorpusSpec spec;
  spec.name = std::move(name);
  spec.domain_tag = std::move(domain);
  std::vector<FieldSpec> fields;
  for (const FieldDef& d : defs) {
    fields.push_back({d.name, d.type, !d.phrases.empty()});
    if (d.frequency < 1.0) spec.field_frequency[d.name] = d.frequency;
    spec.phrase_bank[d.name] = d.phrases;
  }
  spec.schema = FieldSchema(std::move(fields));
  spec.templates = std::move(templates);
  spec.noise = noise;
  spec.seed = seed;
  return spec;
}

CorpusSpec earnings() {
  struct Row {
    const char* key;
    double frequency;
    std::vector<std::string> phrases;
  };
  const std::vector<Row> rows = {
      {"salary", 1.0, {"Base Salary", "Base"}},
      {"overtime", 0.6, {"Overtime", "OT Pay"}},
      {"bonus", 0.5, {"Bonus"}},
      {"vacation", 0.4, {"Vacation", "Vacation Pay"}},
      {"holiday", 0.4, {"Holiday", "Holiday Pay"}},
      {"commission", 0.3, {"Commission"}},
      {"sick_pay", 0.25, {"Sick Pay", "Sick"}},
      {"pto_pay", 0.15, {"PTO", "PTO Pay"}},
      {"incentive_pay", 0.15, {"Incentive", "Incentive Pay"}},
      {"sales_pay", 0.1, {"Sales Pay", "Sales"}},
  };
  CorpusSpec spec = make_spec("synth-earnings", "earnings",
                              {
                                  {"pay_date", BaseType::kDate, 1.0, {"Pay Date", "Check Date"}},
                                  {"period_end", BaseType::kDate, 0.8, {"Period Ending", "Period End"}},
                                  {"net_pay", BaseType::kAmount, 1.0, {"Net Pay"}},
                              },
                              {}, {0.05, 0.1}, 7);
  std::vector<FieldSpec> fields = spec.schema.fields();
  for (const Row& r : rows) {
    std::vector<std::string> group;
    for (const char* column : {"current.", "ytd."}) {
      const std::string name = std::string(column) + r.key;
      fields.push_back({name, BaseType::kAmount, true});
      if (r.frequency < 1.0) spec.field_frequency[name] = r.frequency;
      spec.phrase_bank[name] = r.phrases;
      group.push_back(name);
    }
    spec.contradictory_groups.push_back(std::move(group));
  }
  spec.schema = FieldSchema(std::move(fields));
  spec.templates = {
      {LayoutKind::kTwoColumnTable, {"Current", "YTD"}, 0.002},
      {LayoutKind::kTwoColumnTable, {"This Period", "Year To Date"}, 0.002},
      {LayoutKind::kTwoColumnTable, {"Current", "Year-To-Date"}, 0.003},
  };
  return spec;
}

CorpusSpec bills() {
  return make_spec("synth-bills", "bills",
                   {
                       {"customer_name", BaseType::kName, 1.0, {}},
                       {"customer_address", BaseType::kAddress, 1.0, {}},
                       {"account_number", BaseType::kNumber, 1.0, {"Account Number", "Account No"}},
                       {"bill_date", BaseType::kDate, 1.0, {"Bill Date", "Statement Date"}},
                       {"due_date", BaseType::kDate, 0.9, {"Due Date", "Payment Due"}},
                       {"service_start", BaseType::kDate, 0.5, {"Service From"}},
                       {"amount_due", BaseType::kAmount, 1.0, {"Amount Due", "Total Due"}},
                       {"previous_balance", BaseType::kAmount, 0.7, {"Previous Balance"}},
                       {"current_charges", BaseType::kAmount, 0.8, {"Current Charges"}},
                       {"late_fee", BaseType::kAmount, 0.2, {"Late Fee"}},
                       {"taxes", BaseType::kAmount, 0.5, {"Taxes", "Taxes and Fees"}},
                       {"service_address", BaseType::kAddress, 0.8, {"Service Address"}},
                   },
                   {{LayoutKind::kKeyLeftValueRight, {}, 0.002}, {LayoutKind::kKeyAboveValue, {}, 0.002}},
                   {0.05, 0.1}, 11);
}

CorpusSpec invoices() {
  return make_spec("synth-invoices-ood", "invoices",
                   {
                       {"vendor_name", BaseType::kName, 1.0, {}},
                       {"vendor_address", BaseType::kAddress, 1.0, {}},
                       {"invoice_number", BaseType::kNumber, 1.0, {"Invoice Number", "Invoice No"}},
                       {"po_number", BaseType::kNumber, 0.5, {"PO Number"}},
                       {"invoice_date", BaseType::kDate, 1.0, {"Invoice Date", "Date"}},
                       {"due_date", BaseType::kDate, 0.8, {"Due Date", "Payment Due"}},
                       {"ship_date", BaseType::kDate, 0.4, {"Ship Date"}},
                       {"subtotal", BaseType::kAmount, 0.9, {"Subtotal", "Sub Total"}},
                       {"tax", BaseType::kAmount, 0.8, {"Tax", "Sales Tax"}},
                       {"shipping", BaseType::kAmount, 0.5, {"Shipping", "Freight"}},
                       {"discount", BaseType::kAmount, 0.3, {"Discount"}},
                       {"total", BaseType::kAmount, 1.0, {"Total", "Amount Due", "Balance Due"}},
                       {"ship_to_address", BaseType::kAddress, 0.6, {"Ship To"}},
                   },
                   {{LayoutKind::kKeyLeftValueRight, {}, 0.002}, {LayoutKind::kKeyAboveValue, {}, 0.002}},
                   {0.05, 0.1}, 13);
}

CorpusSpec nophrase() {
  return make_spec("synth-nophrase", "fcc",
                   {
                       {"advertiser_name", BaseType::kName, 1.0, {}},
                       {"advertiser_address", BaseType::kAddress, 1.0, {}},
                       {"agency_name", BaseType::kName, 1.0, {}},
                       {"agency_address", BaseType::kAddress, 1.0, {}},
                       {"station_name", BaseType::kName, 1.0, {}},
                       {"station_address", BaseType::kAddress, 1.0, {}},
                       {"contract_number", BaseType::kNumber, 1.0, {"Contract Number", "Contract No"}},
                       {"flight_start", BaseType::kDate, 1.0, {"Flight Start"}},
                       {"flight_end", BaseType::kDate, 1.0, {"Flight End"}},
                       {"gross_amount", BaseType::kAmount, 0.9, {"Gross Amount", "Total Gross"}},
                       {"net_amount", BaseType::kAmount, 0.8, {"Net Amount"}},
                   },
                   {{LayoutKind::kKeyLeftValueRight, {}, 0.002}, {LayoutKind::kKeyAboveValue, {}, 0.002}},
                   {0.02, 0.1}, 17);
}

}  // namespace

std::map<std::string, CorpusSpec> builtin_specs() {
  std::map<std::string, CorpusSpec> out;
  for (CorpusSpec s : {earnings(), bills(), invoices(), nophrase()}) out.emplace(s.name, std::move(s));
  return out;
}

CorpusSpec builtin_spec(std::string_view name) {
  auto specs = builtin_specs();
  auto it = specs.find(std::string(name));
  if (it == specs.end()) throw DataError("unknown builtin corpus spec '" + std::string(name) + "'");
  return it->second;
}

// ---------------------------------------------------------------------------
// Spec files
// ---------------------------------------------------------------------------

std::string spec_to_json(const CorpusSpec& spec) {
  json templates = json::array();
  for (const auto& t : spec.templates) {
    templates.push_back({{"layout", std::string(to_string(t.layout))}, {"column_headers", t.column_headers}, {"jitter", t.jitter}});
  }
  json j = {{"name", spec.name},
            {"domain_tag", spec.domain_tag},
            {"schema", json::parse(schema_to_json(spec.schema))},
            {"templates", templates},
            {"field_frequency", spec.field_frequency},
            {"phrase_bank", spec.phrase_bank},
            {"contradictory_groups", spec.contradictory_groups},
            {"noise", {{"distractor_token_rate", spec.noise.distractor_token_rate},
                       {"phrase_dropout_rate", spec.noise.phrase_dropout_rate}}},
            {"seed", spec.seed}};
  return j.dump(2);
}

CorpusSpec spec_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    static const std::set<std::string> allowed = {"name",          "domain_tag",  "schema",
                                                  "templates",     "field_frequency", "phrase_bank",
                                                  "contradictory_groups", "noise", "seed"};
    for (const auto& [k, _] : j.items()) {
      if (!allowed.count(k)) throw DataError("corpus spec: unknown key '" + k + "'");
    }
    CorpusSpec spec;
    spec.name = j.at("name").get<std::string>();
    spec.domain_tag = j.value("domain_tag", spec.name);
    spec.schema = schema_from_json(j.at("schema").dump());
    for (const json& jt : j.at("templates")) {
      TemplateSpec t;
      const std::string layout = jt.at("layout").get<std::string>();
      if (layout == "key_left_value_right") {
        t.layout = LayoutKind::kKeyLeftValueRight;
      } else if (layout == "key_above_value") {
        t.layout = LayoutKind::kKeyAboveValue;
      } else if (layout == "two_column_table") {
        t.layout = LayoutKind::kTwoColumnTable;
      } else {
        throw DataError("corpus spec: unknown layout '" + layout + "'");
      }
      t.column_headers = jt.value("column_headers", std::vector<std::string>{});
      t.jitter = jt.value("jitter", 0.002);
      spec.templates.push_back(std::move(t));
    }
    spec.field_frequency = j.value("field_frequency", std::map<std::string, double>{});
    spec.phrase_bank = j.value("phrase_bank", std::map<std::string, std::vector<std::string>>{});
    spec.contradictory_groups = j.value("contradictory_groups", std::vector<std::vector<std::string>>{});
    if (j.contains("noise")) {
      spec.noise.distractor_token_rate = j["noise"].value("distractor_token_rate", 0.05);
      spec.noise.phrase_dropout_rate = j["noise"].value("phrase_dropout_rate", 0.1);
    }
    spec.seed = j.value("seed", std::uint64_t{0});
    const auto problems = validate_spec(spec);
    if (!problems.empty()) throw DataError("corpus spec '" + spec.name + "': " + problems.front());
    return spec;
  } catch (const json::exception& e) {
    throw DataError(std::string("corpus spec: ") + e.what());
  }
}

CorpusSpec read_spec_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus spec '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return spec_from_json(ss.str());
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

}  // namespace fieldswap
