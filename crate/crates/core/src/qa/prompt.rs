use base64::Engine;
use serde::{Deserialize, Serialize};

use super::{ConfigurationKind, QaError, QaPair};
use crate::table::ROW_TOKEN;

/// System message for answering chart questions.
pub const ANSWER_SYSTEM_PROMPT: &str = "You are a helpful assistant that answers queries based on charts and tables. Study the inputs and return only the final integer answer. Do not include explanations.";

/// Instruction that opens every answering prompt.
pub const ANSWER_PROMPT: &str = "Study the chart or the given table and think step by step to arrive at the final integer answer. Only return the final integer answer, no description is required.\n";

/// System message for asking a model to write a question about a table.
pub const QUERY_GENERATION_SYSTEM_PROMPT: &str = "You are a helpful assistant. Help me with my math homework!";

const QUERY_GENERATION_TEMPLATE: &str = r#"
You are an AI assistant tasked with analyzing tabular data extracted from bar chart visualizations. Your job is to generate a single query based on the given table and provide the correct answer as a single integer derived from the data.

Output Requirements:
- Generate one meaningful query based on the table.
- Ensure the query is clear, concise, and specific to a value from the table.
- Provide the correct answer to the query as a single integer.

The following table is represented as text. "|" separates columns (labels and values), and newline marks the end of each row.

{formatted_text}

Provide the output in the following JSON format:
{
  "query": "<generated question>",
  "correct_answer": <integer answer>
}
"#;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub system: String,
    pub user: String,
    pub table_text: Option<String>,
    pub image_base64: Option<String>,
}

impl PromptBundle {
    pub fn attach_image(&mut self, png: &[u8]) {
        self.image_base64 = Some(base64::engine::general_purpose::STANDARD.encode(png));
    }
}

/// Answering prompt for `pair`. Table-bearing configurations append the
/// table text verbatim after the question.
pub fn build_prompt(pair: &QaPair, kind: ConfigurationKind, table_text: Option<&str>) -> Result<PromptBundle, QaError> {
    let table_text = match (kind.requires_table(), table_text) {
        (true, None) => return Err(QaError::MissingTable(pair.chart_id.clone())),
        (false, Some(_)) => {
            return Err(QaError::InvalidConfiguration(format!(
                "{} does not take a table",
                kind.label()
            )))
        }
        (_, t) => t,
    };
    let mut user = format!("{ANSWER_PROMPT}{}", pair.query);
    if let Some(t) = table_text {
        user.push_str("\n\n");
        user.push_str(t);
    }
    Ok(PromptBundle {
        system: ANSWER_SYSTEM_PROMPT.to_string(),
        user,
        table_text: table_text.map(str::to_string),
        image_base64: None,
    })
}

/// Prompt asking a model for one `{"query", "correct_answer"}` pair about a
/// table. Row terminators are shown as newlines.
pub fn query_generation_prompt(table_text: &str) -> PromptBundle {
    let formatted: Vec<&str> = table_text.split(ROW_TOKEN).map(str::trim).collect();
    PromptBundle {
        system: QUERY_GENERATION_SYSTEM_PROMPT.to_string(),
        user: QUERY_GENERATION_TEMPLATE.replace("{formatted_text}", &formatted.join("\n")),
        table_text: Some(table_text.to_string()),
        image_base64: None,
    }
}
