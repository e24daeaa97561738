use std::time::Duration;

use serde_json::Value;

use crate::FetchError;

/// Blocking JSON client with exponential backoff on 429 and 5xx.
/// Requests are strictly sequential.
#[derive(Clone, Debug)]
pub struct HttpClient {
    agent: ureq::Agent,
    base_url: String,
    retries: u32,
    backoff: Duration,
}

impl HttpClient {
    pub fn new(base_url: &str, timeout: Duration, retries: u32, backoff: Duration) -> Self {
        HttpClient {
            agent: ureq::AgentBuilder::new().timeout(timeout).build(),
            base_url: base_url.trim_end_matches('/').to_string(),
            retries,
            backoff,
        }
    }

    pub fn base_url(&self) -> &str {
        &self.base_url
    }

    /// GET `base_url + path_and_query`, parsed as JSON.
    pub fn get_json(&self, path_and_query: &str) -> Result<Value, FetchError> {
        let url = format!("{}{}", self.base_url, path_and_query);
        let mut delay = self.backoff;
        let mut attempt = 0;
        loop {
            log::debug!("GET {url}");
            let retriable = match self.agent.get(&url).call() {
                Ok(resp) => {
                    let body = resp.into_string().map_err(|e| FetchError::Transport {
                        url: url.clone(),
                        message: e.to_string(),
                    })?;
                    return serde_json::from_str(&body).map_err(|e| FetchError::Malformed {
                        url: url.clone(),
                        reason: format!("invalid JSON: {e}"),
                    });
                }
                Err(ureq::Error::Status(status, _)) => {
                    if status == 429 || status >= 500 {
                        FetchError::Http { url: url.clone(), status }
                    } else {
                        return Err(FetchError::Http { url, status });
                    }
                }
                Err(ureq::Error::Transport(t)) => FetchError::Transport {
                    url: url.clone(),
                    message: t.to_string(),
                },
            };
            if attempt >= self.retries {
                return Err(retriable);
            }
            attempt += 1;
            log::warn!("{retriable}; retry {attempt}/{} in {delay:?}", self.retries);
            std::thread::sleep(delay);
            delay *= 2;
        }
    }

    /// Follows the API's `next` links and concatenates every page's `data`.
    pub fn get_all(&self, path_and_query: &str) -> Result<Vec<Value>, FetchError> {
        let mut out = Vec::new();
        let mut next = Some(path_and_query.to_string());
        while let Some(pq) = next.take() {
            let page = self.get_json(&pq)?;
            let data = page.get("data").and_then(Value::as_array).ok_or_else(|| FetchError::Malformed {
                url: format!("{}{}", self.base_url, pq),
                reason: "response has no data array".into(),
            })?;
            out.extend(data.iter().cloned());
            next = page
                .get("next")
                .and_then(Value::as_str)
                .filter(|s| !s.is_empty() && !data.is_empty())
                .map(str::to_string);
        }
        Ok(out)
    }
}
