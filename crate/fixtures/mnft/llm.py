from openai import OpenAI


class ChatModel:
    model_name: str = "gpt-4o-mini"
    api_key: str = "sk-test-key-111"

    def generate(self, prompt: str, stop=None):
        client = OpenAI(api_key=self.api_key)
        response = client.chat.completions.create(
            model=self.model_name,
            messages=[{"role": "user", "content": prompt}],
            stop=stop,
        )
        return response.choices[0].message.content
