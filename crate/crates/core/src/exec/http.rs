use std::collections::HashMap;
use std::io::Read;
use std::sync::Mutex;
use std::time::Duration;

use super::{Dereferencer, ExecConfig, FetchFailure, FetchKind, FetchResult, Fetched};
use crate::rdf::{parse_rdf, RdfSyntax};

pub const ACCEPT: &str = "text/turtle, application/n-triples;q=0.9";

/// Dereferences http(s) IRIs with content negotiation for Turtle and
/// N-Triples. Redirects are followed by hand so 303s count toward the cap.
pub struct HttpDereferencer {
    agent: ureq::Agent,
    robots: Mutex<HashMap<String, Option<Duration>>>,
}

impl Default for HttpDereferencer {
    fn default() -> Self {
        Self::new()
    }
}

impl HttpDereferencer {
    pub fn new() -> Self {
        let ua = std::env::var("LDTRAVERSE_USER_AGENT")
            .unwrap_or_else(|_| format!("ldtraverse/{}", env!("CARGO_PKG_VERSION")));
        HttpDereferencer {
            agent: ureq::AgentBuilder::new().redirects(0).user_agent(&ua).build(),
            robots: Mutex::new(HashMap::new()),
        }
    }

    fn get(&self, url: &str, timeout: Duration) -> Result<ureq::Response, FetchFailure> {
        match self.agent.get(url).set("Accept", ACCEPT).timeout(timeout).call() {
            Ok(r) => Ok(r),
            Err(ureq::Error::Status(code, _)) => Err(FetchFailure::new(FetchKind::NotFound, format!("HTTP {code}"))),
            Err(ureq::Error::Transport(t)) => {
                let msg = t.to_string();
                let kind = if msg.contains("timed out") || msg.contains("Timeout") {
                    FetchKind::Timeout
                } else {
                    FetchKind::Network
                };
                Err(FetchFailure::new(kind, msg))
            }
        }
    }
}

fn syntax_for(content_type: Option<&str>, url: &str) -> Option<RdfSyntax> {
    content_type.and_then(RdfSyntax::from_media_type).or_else(|| {
        let path = url::Url::parse(url).ok()?.path().to_owned();
        let ext = path.rsplit_once('.')?.1.to_owned();
        RdfSyntax::from_extension(&ext)
    })
}

fn parse_crawl_delay(robots: &str) -> Option<Duration> {
    let mut applies = false;
    let mut in_agents = false;
    for line in robots.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        let Some((field, value)) = line.split_once(':') else { continue };
        let (field, value) = (field.trim().to_ascii_lowercase(), value.trim());
        match field.as_str() {
            "user-agent" => {
                if !in_agents {
                    applies = false;
                }
                in_agents = true;
                let v = value.to_ascii_lowercase();
                applies |= v == "*" || v.starts_with("ldtraverse");
            }
            "crawl-delay" if applies => {
                in_agents = false;
                if let Ok(secs) = value.parse::<f64>() {
                    if secs.is_finite() && secs >= 0.0 {
                        return Some(Duration::from_secs_f64(secs));
                    }
                }
            }
            _ => in_agents = false,
        }
    }
    None
}

impl Dereferencer for HttpDereferencer {
    fn fetch(&self, iri: &str, cfg: &ExecConfig) -> FetchResult {
        let timeout = Duration::from_millis(cfg.timeout_ms);
        let mut url = iri.split('#').next().unwrap_or(iri).to_owned();
        if !(url.starts_with("http://") || url.starts_with("https://")) {
            return Err(FetchFailure::new(FetchKind::Network, "only http and https IRIs can be dereferenced"));
        }
        let mut redirects = 0;
        let resp = loop {
            let resp = self.get(&url, timeout)?;
            if !(300..400).contains(&resp.status()) {
                break resp;
            }
            redirects += 1;
            if redirects > cfg.max_redirects {
                return Err(FetchFailure::new(FetchKind::Network, "too many redirects"));
            }
            let Some(location) = resp.header("Location") else {
                return Err(FetchFailure::new(FetchKind::NotFound, format!("HTTP {} without Location", resp.status())));
            };
            url = url::Url::parse(&url)
                .and_then(|base| base.join(location))
                .map_err(|e| FetchFailure::new(FetchKind::Network, format!("bad redirect target: {e}")))?
                .to_string();
        };
        if !(200..300).contains(&resp.status()) {
            return Err(FetchFailure::new(FetchKind::NotFound, format!("HTTP {}", resp.status())));
        }
        let syntax = syntax_for(resp.header("Content-Type"), &url);
        let mut body = String::new();
        resp.into_reader().read_to_string(&mut body).map_err(|e| {
            let kind = if e.kind() == std::io::ErrorKind::TimedOut { FetchKind::Timeout } else { FetchKind::Network };
            FetchFailure::new(kind, e.to_string())
        })?;
        let Some(syntax) = syntax else {
            return Err(FetchFailure::new(FetchKind::NonRdf, "response is neither Turtle nor N-Triples"));
        };
        let graph = parse_rdf(&body, syntax, Some(&url))
            .map_err(|e| FetchFailure::new(FetchKind::NonRdf, e.to_string()))?
            .with_origin(url);
        Ok(Fetched { graph, bytes: body.len() as u64, truncated: false })
    }

    fn crawl_delay(&self, host: &str) -> Option<Duration> {
        if let Some(d) = self.robots.lock().unwrap().get(host) {
            return *d;
        }
        let delay = self
            .agent
            .get(&format!("http://{host}/robots.txt"))
            .timeout(Duration::from_secs(5))
            .call()
            .ok()
            .filter(|r| r.status() == 200)
            .and_then(|r| r.into_string().ok())
            .and_then(|text| parse_crawl_delay(&text));
        self.robots.lock().unwrap().insert(host.to_owned(), delay);
        delay
    }
}
