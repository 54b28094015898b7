use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub content: String,
}

impl ChatMessage {
    pub fn system(content: impl Into<String>) -> Self {
        Self {
            role: Role::System,
            content: content.into(),
        }
    }

    pub fn user(content: impl Into<String>) -> Self {
        Self {
            role: Role::User,
            content: content.into(),
        }
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        Self {
            role: Role::Assistant,
            content: content.into(),
        }
    }
}

/// Contents of every fenced block labelled `rdsl`, in order.
pub fn extract_program_blocks(response: &str) -> Vec<String> {
    let mut blocks = Vec::new();
    let mut current: Option<Vec<&str>> = None;
    for line in response.lines() {
        let trimmed = line.trim();
        match current.as_mut() {
            None => {
                if let Some(label) = trimmed.strip_prefix("```") {
                    if label.trim() == "rdsl" {
                        current = Some(Vec::new());
                    }
                }
            }
            Some(body) => {
                if trimmed == "```" {
                    blocks.push(body.join("\n"));
                    current = None;
                } else {
                    body.push(line);
                }
            }
        }
    }
    blocks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_block() {
        let text = "Here it is:\n```rdsl\nterm p weight 1: in_platoon\n```\nDone.";
        assert_eq!(extract_program_blocks(text), vec!["term p weight 1: in_platoon"]);
    }

    #[test]
    fn prose_only() {
        assert!(extract_program_blocks("no code here\n```python\nx = 1\n```").is_empty());
    }

    #[test]
    fn two_blocks_in_order() {
        let text = "```rdsl\na\n```\ntext\n```rdsl\nb\nc\n```";
        assert_eq!(extract_program_blocks(text), vec!["a", "b\nc"]);
    }

    #[test]
    fn unterminated_block_is_dropped() {
        assert!(extract_program_blocks("```rdsl\nterm p weight 1: 1\n").is_empty());
    }
}
