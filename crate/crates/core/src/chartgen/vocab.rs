use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ChartGenError;

/// Label pools the generator samples from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VocabLists {
    pub titles: Vec<String>,
    pub x_labels: Vec<String>,
    pub y_labels: Vec<String>,
    pub categories: Vec<String>,
    pub series_names: Vec<String>,
}

fn owned(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

impl VocabLists {
    /// Built-in financial vocabulary.
    pub fn financial() -> Self {
        Self {
            titles: owned(&[
                "Quarterly Revenue Growth",
                "Market Share by Region",
                "Profitability Comparison",
                "Strategic Human Capital Management",
                "Financial Metrics",
                "Global Competitive Advantage",
                "Sustainable Development Goals",
                "Corporate Ethics",
                "Market Segmentation",
                "Digital Marketing Trends",
                "Venture Capital Funding",
                "Strategic Marketing Campaigns",
                "Strategic Employee Development",
                "Annual Budget Allocation",
                "Liquidity Risk Overview",
                "Operating Expense Breakdown",
                "Capital Expenditure Plan",
                "Credit Portfolio Quality",
                "Investor Relations Summary",
                "Treasury Performance Review",
            ]),
            x_labels: owned(&[
                "Fiscal Quarter",
                "Region",
                "Product Category",
                "Content Engagement Metric",
                "Operating Profit",
                "Market Trend Analysis",
                "Product Reliability Metric",
                "Skill Level",
                "Employee Department",
                "Business Unit",
                "Fiscal Year",
                "Account Type",
                "Asset Class",
                "Cost Center",
            ]),
            y_labels: owned(&[
                "Revenue ($)",
                "Profit Margin (%)",
                "Market Capitalization ($B)",
                "Asset Turnover Ratio",
                "Interest_Expense($)",
                "Dividends_Per_Share($)",
                "EBT_Dollars($)",
                "Product Customization Metric",
                "Net Income ($M)",
                "Return on Equity (%)",
                "Operating Cash Flow ($M)",
                "Earnings Per Share ($)",
            ]),
            categories: owned(&[
                "Billing",
                "Equity",
                "Sales",
                "Income",
                "Depreciation",
                "Valuation",
                "Loans",
                "Expenditures",
                "Accounts",
                "Audit",
                "Subsidies",
                "Profit",
                "Revenues",
                "Costs",
                "Invoices",
                "Capital",
                "Cash",
                "Operating",
                "Balances",
                "Leverage",
                "Investments",
                "Accounting",
                "Payroll",
                "Reserves",
                "Securities",
                "Margins",
                "Payables",
                "Variable",
                "Projections",
                "Withdrawals",
                "Royalties",
                "Futures",
                "Statements",
                "Dividends",
                "Liabilities",
                "Assets",
                "Debt",
                "Taxes",
                "Bonds",
                "Receivables",
            ]),
            series_names: owned(&[
                "Société Générale",
                "Bank of China",
                "Aomori Bank",
                "Bank of Yokohama",
                "State Street",
                "Shimane Bank",
                "Handelsbanken",
                "Bank of Montreal",
                "WisdomTree Japan",
                "Royal Bank of Scotland",
                "Hokkoku Bank",
                "Sumitomo Mitsui Financial Group",
                "Tokyo Marine Asset Management",
                "Nomura Securities",
                "Monex Group",
                "Rakuten Securities",
                "Citibank",
                "Mizuho Bank",
                "China Merchants Bank",
                "Deutsche Bank",
                "Barclays",
                "BNP Paribas",
            ]),
        }
    }

    /// Example vocabulary for a healthcare corpus.
    pub fn healthcare() -> Self {
        Self {
            titles: owned(&[
                "Patient Survival Rates by Treatment",
                "Hospital Admissions by Disease Type",
                "Readmission Rates by Department",
                "Average Length of Stay",
                "Vaccination Coverage by Region",
                "Clinical Trial Enrollment",
            ]),
            x_labels: owned(&[
                "Disease Type",
                "Treatment Type",
                "Patient Age Group",
                "Department",
                "Region",
            ]),
            y_labels: owned(&[
                "Survival Rate %",
                "Number of Admissions",
                "Average Stay (days)",
                "Cost per Patient ($)",
            ]),
            categories: owned(&[
                "Cardiology",
                "Oncology",
                "Neurology",
                "Pediatrics",
                "Orthopedics",
                "Diabetes",
                "Asthma",
                "Influenza",
                "Hypertension",
                "Pneumonia",
            ]),
            series_names: owned(&[
                "Chemotherapy",
                "Radiotherapy",
                "Surgery",
                "Immunotherapy",
                "Placebo",
                "Outpatient",
            ]),
        }
    }

    pub fn load(path: &Path) -> Result<Self, ChartGenError> {
        let text = std::fs::read_to_string(path).map_err(|e| ChartGenError::io(path, e))?;
        let vocab: VocabLists = serde_json::from_str(&text)
            .map_err(|e| ChartGenError::InvalidConfig(format!("vocabulary {}: {e}", path.display())))?;
        vocab.validate()?;
        Ok(vocab)
    }

    pub fn validate(&self) -> Result<(), ChartGenError> {
        let lists = [
            ("titles", &self.titles),
            ("x_labels", &self.x_labels),
            ("y_labels", &self.y_labels),
            ("categories", &self.categories),
            ("series_names", &self.series_names),
        ];
        for (name, list) in lists {
            if list.is_empty() {
                return Err(ChartGenError::InvalidConfig(format!("vocabulary list {name} is empty")));
            }
            let mut seen = HashSet::new();
            for item in list {
                if item.trim().is_empty() || item.contains('|') || item.contains(crate::table::ROW_TOKEN) {
                    return Err(ChartGenError::InvalidConfig(format!(
                        "vocabulary list {name} has an unusable entry {item:?}"
                    )));
                }
                if !seen.insert(item.as_str()) {
                    return Err(ChartGenError::InvalidConfig(format!(
                        "vocabulary list {name} repeats {item:?}"
                    )));
                }
            }
        }
        Ok(())
    }
}

impl Default for VocabLists {
    fn default() -> Self {
        Self::financial()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::{canonical_cell, parse_number};

    #[test]
    fn builtin_vocabularies_are_valid() {
        VocabLists::financial().validate().unwrap();
        VocabLists::healthcare().validate().unwrap();
    }

    #[test]
    fn builtin_labels_are_canonical_text() {
        for vocab in [VocabLists::financial(), VocabLists::healthcare()] {
            for list in [&vocab.titles, &vocab.x_labels, &vocab.y_labels, &vocab.categories, &vocab.series_names] {
                for item in list {
                    assert_eq!(&canonical_cell(item), item);
                    assert_eq!(parse_number(item), None, "{item}");
                }
            }
        }
    }

    #[test]
    fn rejects_duplicates_and_empty_lists() {
        let mut v = VocabLists::financial();
        v.categories.push("Billing".into());
        assert!(v.validate().is_err());
        let mut v = VocabLists::financial();
        v.titles.clear();
        assert!(v.validate().is_err());
    }

    #[test]
    fn json_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vocab.json");
        std::fs::write(&path, serde_json::to_string(&VocabLists::healthcare()).unwrap()).unwrap();
        assert_eq!(VocabLists::load(&path).unwrap(), VocabLists::healthcare());
    }
}
