from openai import OpenAI


class ChatLLM:
    model: str = "gpt-4o"
    api_key: str = "sk-test-key-000"

    def generate(self, prompt: str, stop=None):
        client = OpenAI(api_key=self.api_key)
        response = client.chat.completions.create(
            model=self.model,
            messages=[{"role": "user", "content": prompt}],
            stop=stop,
        )
        return response.choices[0].message.content
