import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    // the replay suite simulates a corpus and boots the real service
    testTimeout: 180_000,
    hookTimeout: 600_000,
    pool: "forks",
  },
});
