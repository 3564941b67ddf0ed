"""Black-box model endpoints: a chat-completion contract with
provider adapters, a scripted mock, retries, an in-flight cap
and exact cost metering."""
