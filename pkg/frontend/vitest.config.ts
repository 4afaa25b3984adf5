import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    // the live suite boots the real service and plays whole sessions
    testTimeout: 120_000,
    hookTimeout: 120_000,
  },
});
